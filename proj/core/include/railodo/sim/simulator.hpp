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
#include <random>
#include <vector>

#include <Eigen/Core>

#include "railodo/camera.hpp"
#include "railodo/path.hpp"
#include "railodo/pose.hpp"
#include "railodo/sim/scenario.hpp"
#include "railodo/speed_profile.hpp"

namespace railodo::sim {

// Deterministic random stream. All draws go through one generator in a
// fixed order so a seed pins every output bit. gaussian() is a fixed
// Box-Muller (not std::normal_distribution) to keep the stream independent
// of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal.
  double gaussian();
  Eigen::Vector2d gaussian2();
  Eigen::Vector3d gaussian3();

 private:
  std::mt19937_64 gen_;
};

struct GroundTruthSample {
  double t = 0.0;
  Pose pose;  // world-from-body
  Eigen::Vector3d velocity_world = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_rate_body = Eigen::Vector3d::Zero();
  Eigen::Vector3d accel_world = Eigen::Vector3d::Zero();  // gravity excluded
  double arc_length = 0.0;
};

using GroundTruth = std::vector<GroundTruthSample>;

// Samples the analytic trajectory at the given rate, t = 0, 1/rate, ...,
// up to the profile duration (inclusive). Throws ProfileOverrunsPath when
// the profile covers more arc length than the path provides.
GroundTruth sample_trajectory(const RailPath& path, const SpeedProfile& profile,
                              double rate_hz);

struct ImuSample {
  double t = 0.0;
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s, body frame
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2, body frame
};

struct ImuData {
  std::vector<ImuSample> samples;
  // True bias at each sample (for tests; not part of the sensor log).
  std::vector<Eigen::Vector3d> gyro_bias;
  std::vector<Eigen::Vector3d> accel_bias;
};

// Corrupts the analytic specific force / angular rate with bias random
// walks and white noise. `gt` must be sampled at spec.rate_hz.
ImuData generate_imu(const GroundTruth& gt, const ImuSpec& spec, double gravity,
                     Rng& rng);

// Scatters round(density * track_length) landmarks in the trackside
// corridor, then appends the aliasing row (exactly spaced along the
// centerline) when enabled. Ids are dense and start at 0; row landmarks
// come last in id order.
struct LandmarkWorld {
  std::vector<Landmark> all;
  std::int64_t first_row_id = -1;  // -1 when no aliasing row
};
LandmarkWorld generate_landmarks(const ScenarioConfig& sc, const RailPath& path,
                                 Rng& rng);

struct FrameObservation {
  int frame_id = 0;
  std::int64_t landmark_id = 0;
  Eigen::Vector2d px0 = Eigen::Vector2d::Zero();
  std::optional<Eigen::Vector2d> px1;  // stereo match in cam1
  std::optional<double> depth;         // measured depth from the noisy match
};

struct CameraFrame {
  int id = 0;
  double t = 0.0;
};

// Everything the estimator is allowed to see. The rig here is the reported
// one (true rig plus any calibration perturbation).
struct SensorLog {
  CameraIntrinsics intrinsics;
  StereoRig rig;
  Pose T_body_cam0;
  ImuSpec imu_spec;
  double gravity = 9.81;
  double camera_rate_hz = 20.0;
  double pixel_sigma = 1.0;
  std::vector<ImuSample> imu;
  std::vector<CameraFrame> frames;
  std::vector<FrameObservation> observations;  // sorted by (frame, landmark)
};

struct SimulationResult {
  GroundTruth gt_frames;  // at camera rate
  SensorLog log;
  LandmarkWorld world;    // true positions (never written to the log)
  StereoRig true_rig;
  std::vector<Eigen::Vector3d> true_gyro_bias;   // per IMU sample
  std::vector<Eigen::Vector3d> true_accel_bias;
};

// Fixed camera mounting: cam0 at the body origin, optical axis along body
// x, pixel u along body -y (right), pixel v along body -z (down).
Pose body_from_cam0();

// cam1 sits at body (0, -baseline, 0) with the same orientation, i.e. at
// (baseline, 0, 0) in cam0 coordinates.
StereoRig true_stereo_rig(double baseline);

// Reported rig: true rig with the deterministic calibration error applied
// (rotation about the cam1 y-axis, translation along the rig x-axis).
StereoRig reported_stereo_rig(double baseline, const CalibPerturbSpec& perturb);

// Runs the full pipeline deterministically: ground truth, landmarks, IMU,
// observations. One Rng seeded from sc.seed, draws in a fixed order
// (landmarks, IMU, then per-frame observation noise).
SimulationResult simulate(const ScenarioConfig& sc);

}  // namespace railodo::sim
