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

#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "railodo/pose.hpp"
#include "railodo/sim/simulator.hpp"

namespace railodo::imu {

using sim::ImuSample;

struct ImuNoiseParams {
  double gyro_noise_density = 2e-4;
  double accel_noise_density = 2e-3;
  double gyro_bias_walk = 4e-6;
  double accel_bias_walk = 4e-5;
};

struct ImuBias {
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
};

// Relative motion increment between two times, integrated in the frame of
// the first state and independent of its pose/velocity:
//   R_j = R_i * dR,  v_j = v_i + g dt + R_i dv,
//   p_j = p_i + v_i dt + 0.5 g dt^2 + R_i dp.
// Midpoint integration over the raw samples; the 9x9 covariance is over
// the error state (dtheta, dv, dp), conditioned on the linearization bias.
// First-order bias Jacobians allow cheap re-linearization.
struct PreintegratedImu {
  double dt = 0.0;
  int n_samples = 0;
  ImuBias bias_lin;
  ImuNoiseParams noise;

  Eigen::Quaterniond delta_rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d delta_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d delta_position = Eigen::Vector3d::Zero();
  Eigen::Matrix<double, 9, 9> covariance = Eigen::Matrix<double, 9, 9>::Zero();

  Eigen::Matrix3d d_rotation_d_gyro_bias = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_velocity_d_gyro_bias = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_velocity_d_accel_bias = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_position_d_gyro_bias = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_position_d_accel_bias = Eigen::Matrix3d::Zero();
};

// Integrates consecutive samples (strictly increasing timestamps). Throws
// EmptyWindow for fewer than two samples, NonMonotonicTimestamps otherwise.
PreintegratedImu integrate(std::span<const ImuSample> samples,
                           const ImuNoiseParams& noise, const ImuBias& bias_lin);

struct Deltas {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

// First-order bias correction around pre.bias_lin.
Deltas correct_bias(const PreintegratedImu& pre, const ImuBias& bias);

struct NavState {
  Pose pose;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

// Propagates a state through the increment using the given bias.
// gravity_world is typically (0, 0, -9.81).
NavState predict_state(const NavState& state_i, const ImuBias& bias,
                       const PreintegratedImu& pre,
                       const Eigen::Vector3d& gravity_world);

}  // namespace railodo::imu
