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

#include <vector>

#include "railodo/est/solver.hpp"
#include "railodo/est/window.hpp"
#include "railodo/sim/simulator.hpp"
#include "railodo/trajectory.hpp"

namespace railodo::est {

// External initialization hint. The estimator's world frame is the first
// body frame, so the velocity is given in the body frame at the first
// camera timestamp.
struct InitialStateHint {
  bool has_velocity = false;
  Eigen::Vector3d velocity_body = Eigen::Vector3d::Zero();
};

struct FrameDiagnostic {
  int frame_id = 0;
  double t = 0.0;
  int n_obs = 0;
  int iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  int n_depth = 0;
  int n_depth_gated = 0;
  int n_behind_camera = 0;
  bool coasted = false;  // fewer than kMinObservations, pose propagated
};

struct EstimationResult {
  Trajectory trajectory;  // one pose per camera frame
  std::vector<FrameDiagnostic> frames;
};

// Number of ingested observations below which a frame counts as a gap.
inline constexpr int kMinObservations = 5;

// Runs the sliding-window estimator over a sensor log. Every camera frame
// becomes a keyframe; the pose written out for a frame is the newest
// window state right after that frame's solve. Frames with too few
// observations are bridged by IMU prediction (inertial modes) or a
// constant-velocity guess (stereo) and flagged in the diagnostics.
// In batch mode the whole log becomes one problem, solved once with the
// first pose fixed.
EstimationResult run_estimator(const sim::SensorLog& log,
                               const EstimatorConfig& config,
                               const InitialStateHint& hint = {});

}  // namespace railodo::est
