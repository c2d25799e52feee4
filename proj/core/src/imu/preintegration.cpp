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

#include "railodo/imu/preintegration.hpp"

#include <cmath>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo::imu {

PreintegratedImu integrate(std::span<const ImuSample> samples,
                           const ImuNoiseParams& noise,
                           const ImuBias& bias_lin) {
  if (samples.size() < 2) {
    throw EmptyWindow("integrate: need at least two IMU samples");
  }
  PreintegratedImu pre;
  pre.bias_lin = bias_lin;
  pre.noise = noise;
  pre.n_samples = static_cast<int>(samples.size());

  Eigen::Matrix3d dR = Eigen::Matrix3d::Identity();
  Eigen::Vector3d dv = Eigen::Vector3d::Zero();
  Eigen::Vector3d dp = Eigen::Vector3d::Zero();
  Eigen::Matrix<double, 9, 9> P = Eigen::Matrix<double, 9, 9>::Zero();

  const double var_g = noise.gyro_noise_density * noise.gyro_noise_density;
  const double var_a = noise.accel_noise_density * noise.accel_noise_density;

  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double dt = samples[k + 1].t - samples[k].t;
    if (!(dt > 0.0)) {
      throw NonMonotonicTimestamps("integrate: timestamps must strictly increase");
    }
    const Eigen::Vector3d w_mid =
        0.5 * (samples[k].gyro + samples[k + 1].gyro) - bias_lin.gyro;
    const Eigen::Vector3d a0 = samples[k].accel - bias_lin.accel;
    const Eigen::Vector3d a1 = samples[k + 1].accel - bias_lin.accel;

    const Eigen::Vector3d phi = w_mid * dt;
    const Eigen::Matrix3d E = exp_so3(phi);
    const Eigen::Matrix3d Jr = right_jacobian_so3(phi);
    const Eigen::Matrix3d dR_next = dR * E;

    const Eigen::Vector3d a_mid = 0.5 * (dR * a0 + dR_next * a1);

    // Error-state transition for (dtheta, dv, dp). dtheta lives in the
    // body frame at the interval end: dtheta' = E^T dtheta + Jr dt n_w.
    const Eigen::Matrix3d A0 = dR * skew(a0);
    const Eigen::Matrix3d A1 = dR_next * skew(a1);

    Eigen::Matrix<double, 9, 9> F = Eigen::Matrix<double, 9, 9>::Identity();
    F.block<3, 3>(0, 0) = E.transpose();
    F.block<3, 3>(3, 0) = -0.5 * dt * (A0 + A1 * E.transpose());
    F.block<3, 3>(6, 0) = 0.5 * dt * F.block<3, 3>(3, 0);
    F.block<3, 3>(6, 3) = dt * Eigen::Matrix3d::Identity();

    // Noise inputs: (n_w0, n_a0, n_w1, n_a1), each with per-sample
    // variance density^2 / dt.
    Eigen::Matrix<double, 9, 12> G = Eigen::Matrix<double, 9, 12>::Zero();
    const Eigen::Matrix3d Gw = 0.5 * dt * Jr;
    const Eigen::Matrix3d Gvw = -0.25 * dt * dt * A1 * Jr;
    G.block<3, 3>(0, 0) = Gw;
    G.block<3, 3>(0, 6) = Gw;
    G.block<3, 3>(3, 0) = Gvw;
    G.block<3, 3>(3, 6) = Gvw;
    G.block<3, 3>(3, 3) = 0.5 * dt * dR;
    G.block<3, 3>(3, 9) = 0.5 * dt * dR_next;
    G.block<3, 3>(6, 0) = 0.5 * dt * Gvw;
    G.block<3, 3>(6, 6) = 0.5 * dt * Gvw;
    G.block<3, 3>(6, 3) = 0.25 * dt * dt * dR;
    G.block<3, 3>(6, 9) = 0.25 * dt * dt * dR_next;

    Eigen::Matrix<double, 12, 12> Q = Eigen::Matrix<double, 12, 12>::Zero();
    Q.block<3, 3>(0, 0) = (var_g / dt) * Eigen::Matrix3d::Identity();
    Q.block<3, 3>(3, 3) = (var_a / dt) * Eigen::Matrix3d::Identity();
    Q.block<3, 3>(6, 6) = Q.block<3, 3>(0, 0);
    Q.block<3, 3>(9, 9) = Q.block<3, 3>(3, 3);

    P = F * P * F.transpose() + G * Q * G.transpose();

    // First-order bias Jacobians (recursions mirror the error dynamics).
    const Eigen::Matrix3d J_R_next =
        E.transpose() * pre.d_rotation_d_gyro_bias - Jr * dt;
    const Eigen::Matrix3d dA_mid_dbg =
        -0.5 * (A0 * pre.d_rotation_d_gyro_bias + A1 * J_R_next);
    pre.d_position_d_gyro_bias += pre.d_velocity_d_gyro_bias * dt +
                                  0.5 * dt * dt * dA_mid_dbg;
    pre.d_position_d_accel_bias += pre.d_velocity_d_accel_bias * dt -
                                   0.25 * dt * dt * (dR + dR_next);
    pre.d_velocity_d_gyro_bias += dt * dA_mid_dbg;
    pre.d_velocity_d_accel_bias += -0.5 * dt * (dR + dR_next);
    pre.d_rotation_d_gyro_bias = J_R_next;

    dp += dv * dt + 0.5 * dt * dt * a_mid;
    dv += a_mid * dt;
    dR = dR_next;
    pre.dt += dt;
  }

  pre.delta_rotation = Eigen::Quaterniond(dR).normalized();
  pre.delta_velocity = dv;
  pre.delta_position = dp;
  pre.covariance = P;
  return pre;
}

Deltas correct_bias(const PreintegratedImu& pre, const ImuBias& bias) {
  const Eigen::Vector3d dbg = bias.gyro - pre.bias_lin.gyro;
  const Eigen::Vector3d dba = bias.accel - pre.bias_lin.accel;
  Deltas out;
  out.rotation =
      (pre.delta_rotation * quat_exp(pre.d_rotation_d_gyro_bias * dbg))
          .normalized();
  out.velocity = pre.delta_velocity + pre.d_velocity_d_gyro_bias * dbg +
                 pre.d_velocity_d_accel_bias * dba;
  out.position = pre.delta_position + pre.d_position_d_gyro_bias * dbg +
                 pre.d_position_d_accel_bias * dba;
  return out;
}

NavState predict_state(const NavState& state_i, const ImuBias& bias,
                       const PreintegratedImu& pre,
                       const Eigen::Vector3d& gravity_world) {
  const Deltas d = correct_bias(pre, bias);
  const double dt = pre.dt;
  const Eigen::Matrix3d R_i = state_i.pose.rotation_matrix();
  NavState out;
  out.pose.rotation = (state_i.pose.rotation * d.rotation).normalized();
  out.velocity = state_i.velocity + gravity_world * dt + R_i * d.velocity;
  out.pose.translation = state_i.pose.translation + state_i.velocity * dt +
                         0.5 * gravity_world * dt * dt + R_i * d.position;
  return out;
}

}  // namespace railodo::imu
