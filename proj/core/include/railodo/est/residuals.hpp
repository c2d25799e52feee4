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

#include <optional>

#include <Eigen/Core>

#include "railodo/camera.hpp"
#include "railodo/imu/preintegration.hpp"
#include "railodo/pose.hpp"

namespace railodo::est {

using imu::ImuBias;
using imu::PreintegratedImu;

// One estimator state. The tangent-space ordering used by every Jacobian
// in this module is [dtheta(3), dp(3), dv(3), dbg(3), dba(3)], with
// rotation perturbed on the right (R <- R Exp(dtheta)) and position,
// velocity and biases additive. dp and dv are world-frame.
struct KeyframeState {
  double t = 0.0;
  Pose pose;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  ImuBias bias;
};

// All residuals below are whitened: unit covariance under the assumed
// noise models, so blocks stack directly into a Gauss-Newton system.

struct ReprojectionResidual {
  Eigen::Vector2d r = Eigen::Vector2d::Zero();
  Eigen::Matrix<double, 2, 3> J_theta;  // w.r.t. dtheta of the pose
  Eigen::Matrix<double, 2, 3> J_p;      // w.r.t. dp of the pose
  Eigen::Matrix<double, 2, 3> J_l;      // w.r.t. the landmark position
};

// Pixel reprojection error, (predicted - observed) / pixel_sigma.
// T_body_cam maps camera points into the body frame (chain the rig
// extrinsics in for the second camera). Throws BehindCamera when the
// landmark is at or behind the camera plane.
ReprojectionResidual reprojection_residual(const Pose& T_world_body,
                                           const Pose& T_body_cam,
                                           const CameraIntrinsics& K,
                                           const Eigen::Vector3d& landmark,
                                           const Eigen::Vector2d& pixel,
                                           double pixel_sigma);

struct DepthModel {
  double weight = 1.0;          // w_d, information multiplier
  double cutoff_factor = 40.0;  // gate: measured depth >= factor * baseline
  double pixel_sigma = 1.0;
};

struct DepthResidual {
  double r = 0.0;
  Eigen::RowVector3d J_theta;
  Eigen::RowVector3d J_p;
  Eigen::RowVector3d J_l;
};

// Weighted depth error: (predicted cam0 z - measured) / (sigma_d / sqrt(w_d))
// with sigma_d = d^2 sigma_px sqrt(2) / (fx b) evaluated at the measured
// depth. Returns nullopt when the measurement is at or beyond the range
// gate. Throws BehindCamera when the landmark is behind the camera.
std::optional<DepthResidual> depth_residual(const Pose& T_world_body,
                                            const Pose& T_body_cam0,
                                            const CameraIntrinsics& K,
                                            const Eigen::Vector3d& landmark,
                                            double measured_depth,
                                            double baseline,
                                            const DepthModel& model);

struct InertialResidual {
  // Rows: [r_R(3), r_v(3), r_p(3), r_bg(3), r_ba(3)], whitened.
  Eigen::Matrix<double, 15, 1> r;
  Eigen::Matrix<double, 15, 15> J_i;  // w.r.t. state i tangent
  Eigen::Matrix<double, 15, 15> J_j;  // w.r.t. state j tangent
};

// Preintegrated IMU residual between consecutive states plus the bias
// random-walk residual. Whitening uses the preintegration covariance
// (Cholesky) and the walk densities over pre.dt. Throws NonAdjacentStates
// when state_j.t - state_i.t differs from pre.dt by more than 1e-6 s.
InertialResidual inertial_residual(const KeyframeState& state_i,
                                   const KeyframeState& state_j,
                                   const PreintegratedImu& pre,
                                   const Eigen::Vector3d& gravity_world);

}  // namespace railodo::est
