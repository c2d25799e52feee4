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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "railodo/camera.hpp"
#include "railodo/config.hpp"
#include "railodo/est/residuals.hpp"
#include "railodo/imu/preintegration.hpp"

namespace railodo::est {

enum class Mode {
  kMonoInertial,   // cam0 pixels + IMU; stereo pixels and depths ignored
  kStereo,         // both cameras + depth errors, no IMU
  kStereoInertial, // everything
};

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

// True when the mode carries velocity/bias states and IMU links.
inline bool uses_imu(Mode mode) { return mode != Mode::kStereo; }

struct EstimatorConfig {
  Mode mode = Mode::kStereoInertial;
  int window_size = 10;
  int max_iterations = 15;
  double huber_pixels = 2.0;        // robust threshold, pixel units
  double depth_weight = 1.0;        // w_d
  double depth_cutoff_factor = 40.0;
  double pixel_sigma = 1.0;
  std::optional<PixelRect> mask;    // observations inside are ignored
  bool batch = false;               // single full-trajectory solve
  double rel_decrease_tol = 1e-6;
  double step_tol = 1e-8;
};

// Reads estimator keys (estimator.mode, estimator.window_size, ...);
// unknown keys under "estimator." are rejected.
EstimatorConfig load_estimator_config(const KeyValueConfig& cfg);

// Tangent dimension per keyframe: 6 (pose) or 15 (pose, velocity, bias).
inline int state_dim(Mode mode) { return uses_imu(mode) ? 15 : 6; }

struct TrackObservation {
  int kf = 0;  // window slot
  Eigen::Vector2d px0 = Eigen::Vector2d::Zero();
  std::optional<Eigen::Vector2d> px1;
  std::optional<double> depth;
};

struct WindowLandmark {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::vector<TrackObservation> obs;
  bool active = false;  // inactive landmarks are carried but not optimized
};

// Marginalization prior over the leading `lin.size()` keyframes of the
// window, in square-root form: r = sqrt_info * stack(x [-] lin) + r0.
struct MargPrior {
  Eigen::MatrixXd sqrt_info;  // rank x (state_dim * lin.size())
  Eigen::VectorXd r0;
  std::vector<KeyframeState> lin;
};

// The sliding-window nonlinear least-squares problem. Exactly one gauge
// mechanism is active per solve: the marginalization prior when present,
// otherwise the first pose is held constant.
struct WindowProblem {
  Mode mode = Mode::kStereoInertial;

  CameraIntrinsics K;
  Pose T_body_cam0;
  Pose T_body_cam1;  // T_body_cam0 * T_cam0_cam1
  double baseline = 0.31;
  Eigen::Vector3d gravity_world = Eigen::Vector3d(0.0, 0.0, -9.81);
  imu::ImuNoiseParams imu_noise;

  std::vector<KeyframeState> states;
  std::vector<PreintegratedImu> imu_links;  // [i] spans states[i] -> [i+1]
  std::map<std::int64_t, WindowLandmark> landmarks;
  std::optional<MargPrior> prior;
  bool fix_first_pose = true;
};

}  // namespace railodo::est
