// Copyright (c) 2026 The railodo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "railodo/camera.hpp"
#include "railodo/config.hpp"
#include "railodo/path.hpp"
#include "railodo/speed_profile.hpp"

namespace railodo::sim {

struct ImuSpec {
  double rate_hz = 300.0;
  double gyro_noise_density = 2e-4;   // rad/s/sqrt(Hz)
  double accel_noise_density = 2e-3;  // m/s^2/sqrt(Hz)
  double gyro_bias_walk = 4e-6;       // rad/s^2/sqrt(Hz)
  double accel_bias_walk = 4e-5;      // m/s^3/sqrt(Hz)
  Eigen::Vector3d initial_gyro_bias = Eigen::Vector3d::Zero();
  Eigen::Vector3d initial_accel_bias = Eigen::Vector3d::Zero();
};

struct LandmarkField {
  double density_per_m = 0.5;   // landmarks per meter of track
  double lateral_min_m = 2.0;   // measured from the track centerline
  double lateral_max_m = 20.0;
  double height_min_m = -1.0;
  double height_max_m = 8.0;
};

// Repeated trackside structure: a row of landmarks on the centerline with
// exact spacing, plus a data-association fault model that swaps adjacent
// row landmarks with the given probability.
struct AliasingSpec {
  bool enabled = false;
  double spacing_m = 2.0;
  double lateral_m = 0.0;
  double height_m = -2.5;
  double mismatch_prob = 0.0;
};

struct DropoutSpec {
  double start_prob = 0.0;  // per-frame probability of starting a gap
  int gap_frames = 5;       // frames with no observations per gap
};

// Deterministic error on the rig parameters handed to the estimator.
// Pixels are always rendered with the true rig; the log reports cam1
// extrinsics rotated by rot_deg about the camera y-axis (the convergence
// angle, the least observable stereo-calibration direction) and shifted by
// trans_m along the camera x-axis.
struct CalibPerturbSpec {
  double rot_deg = 0.0;
  double trans_m = 0.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  PathSpec path;
  SpeedProfileSpec profile;

  double camera_rate_hz = 20.0;
  CameraIntrinsics intrinsics;
  double baseline_m = 0.31;
  double pixel_sigma = 1.0;
  double max_range_m = 80.0;  // rendering range cap, cam0 depth
  // Stereo matches exist only within this many baselines of range, so the
  // usable stereo volume scales with the rig width.
  double stereo_range_factor = 60.0;

  ImuSpec imu;
  double gravity = 9.81;

  LandmarkField landmarks;
  AliasingSpec aliasing;
  DropoutSpec dropout;
  CalibPerturbSpec perturb;
};

// Parses a scenario config; rejects unknown keys. Callers may set()
// overrides (e.g. from CLI flags) on the config before this call.
ScenarioConfig load_scenario(const KeyValueConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace railodo::sim
