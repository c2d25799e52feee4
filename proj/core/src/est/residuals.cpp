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

#include "railodo/est/residuals.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo::est {

ReprojectionResidual reprojection_residual(const Pose& T_world_body,
                                           const Pose& T_body_cam,
                                           const CameraIntrinsics& K,
                                           const Eigen::Vector3d& landmark,
                                           const Eigen::Vector2d& pixel,
                                           double pixel_sigma) {
  const Eigen::Matrix3d R_wb = T_world_body.rotation_matrix();
  const Eigen::Matrix3d R_bc = T_body_cam.rotation_matrix();
  const Eigen::Vector3d p_b =
      R_wb.transpose() * (landmark - T_world_body.translation);
  const Eigen::Vector3d p_c = R_bc.transpose() * (p_b - T_body_cam.translation);
  if (p_c.z() <= 1e-6) {
    throw BehindCamera("reprojection_residual: landmark behind the camera");
  }

  const double iz = 1.0 / p_c.z();
  const double is = 1.0 / pixel_sigma;
  ReprojectionResidual out;
  out.r.x() = (K.fx * p_c.x() * iz + K.cx - pixel.x()) * is;
  out.r.y() = (K.fy * p_c.y() * iz + K.cy - pixel.y()) * is;

  Eigen::Matrix<double, 2, 3> dpx_dpc;
  dpx_dpc << K.fx * iz, 0.0, -K.fx * p_c.x() * iz * iz,
             0.0, K.fy * iz, -K.fy * p_c.y() * iz * iz;
  dpx_dpc *= is;

  const Eigen::Matrix3d R_cb = R_bc.transpose();
  const Eigen::Matrix3d R_cw = R_cb * R_wb.transpose();
  out.J_theta = dpx_dpc * (R_cb * skew(p_b));
  out.J_p = -dpx_dpc * R_cw;
  out.J_l = dpx_dpc * R_cw;
  return out;
}

std::optional<DepthResidual> depth_residual(const Pose& T_world_body,
                                            const Pose& T_body_cam0,
                                            const CameraIntrinsics& K,
                                            const Eigen::Vector3d& landmark,
                                            double measured_depth,
                                            double baseline,
                                            const DepthModel& model) {
  if (measured_depth >= model.cutoff_factor * baseline) {
    return std::nullopt;
  }
  const Eigen::Matrix3d R_wb = T_world_body.rotation_matrix();
  const Eigen::Matrix3d R_bc = T_body_cam0.rotation_matrix();
  const Eigen::Vector3d p_b =
      R_wb.transpose() * (landmark - T_world_body.translation);
  const Eigen::Vector3d p_c =
      R_bc.transpose() * (p_b - T_body_cam0.translation);
  if (p_c.z() <= 1e-6) {
    throw BehindCamera("depth_residual: landmark behind the camera");
  }

  const double sigma =
      depth_sigma(measured_depth, model.pixel_sigma, K.fx, baseline) /
      std::sqrt(model.weight);
  const double iw = 1.0 / sigma;

  DepthResidual out;
  out.r = (p_c.z() - measured_depth) * iw;

  const Eigen::Matrix3d R_cb = R_bc.transpose();
  const Eigen::Matrix3d R_cw = R_cb * R_wb.transpose();
  out.J_theta = iw * (R_cb * skew(p_b)).row(2);
  out.J_p = -iw * R_cw.row(2);
  out.J_l = iw * R_cw.row(2);
  return out;
}

InertialResidual inertial_residual(const KeyframeState& state_i,
                                   const KeyframeState& state_j,
                                   const PreintegratedImu& pre,
                                   const Eigen::Vector3d& gravity_world) {
  if (std::abs((state_j.t - state_i.t) - pre.dt) > 1e-6) {
    throw NonAdjacentStates(
        "inertial_residual: states do not bracket the preintegration span");
  }
  const double dt = pre.dt;
  const imu::Deltas d = correct_bias(pre, state_i.bias);

  const Eigen::Matrix3d R_i = state_i.pose.rotation_matrix();
  const Eigen::Matrix3d R_j = state_j.pose.rotation_matrix();
  const Eigen::Matrix3d R_it = R_i.transpose();

  // Raw residual, ordered (r_R, r_v, r_p).
  const Eigen::Matrix3d E_err =
      d.rotation.toRotationMatrix().transpose() * R_it * R_j;
  const Eigen::Vector3d r_R = log_so3(E_err);
  const Eigen::Vector3d v_term =
      R_it * (state_j.velocity - state_i.velocity - gravity_world * dt);
  const Eigen::Vector3d r_v = v_term - d.velocity;
  const Eigen::Vector3d p_term =
      R_it * (state_j.pose.translation - state_i.pose.translation -
              state_i.velocity * dt - 0.5 * gravity_world * dt * dt);
  const Eigen::Vector3d r_p = p_term - d.position;

  // Unwhitened Jacobians over [dtheta, dp, dv, dbg, dba].
  Eigen::Matrix<double, 9, 15> A_i = Eigen::Matrix<double, 9, 15>::Zero();
  Eigen::Matrix<double, 9, 15> A_j = Eigen::Matrix<double, 9, 15>::Zero();

  const Eigen::Matrix3d Jr_inv = right_jacobian_inv_so3(r_R);
  // The correction applies Exp(J_R xi) with xi linear in the bias, so the
  // exact derivative picks up Jr(xi) from the exponential chain rule.
  const Eigen::Vector3d xi =
      pre.d_rotation_d_gyro_bias * (state_i.bias.gyro - pre.bias_lin.gyro);
  A_i.block<3, 3>(0, 0) = -Jr_inv * R_j.transpose() * R_i;
  A_i.block<3, 3>(0, 9) = -Jr_inv * E_err.transpose() *
                          right_jacobian_so3(xi) * pre.d_rotation_d_gyro_bias;
  A_j.block<3, 3>(0, 0) = Jr_inv;

  A_i.block<3, 3>(3, 0) = skew(v_term);
  A_i.block<3, 3>(3, 6) = -R_it;
  A_i.block<3, 3>(3, 9) = -pre.d_velocity_d_gyro_bias;
  A_i.block<3, 3>(3, 12) = -pre.d_velocity_d_accel_bias;
  A_j.block<3, 3>(3, 6) = R_it;

  A_i.block<3, 3>(6, 0) = skew(p_term);
  A_i.block<3, 3>(6, 3) = -R_it;
  A_i.block<3, 3>(6, 6) = -R_it * dt;
  A_i.block<3, 3>(6, 9) = -pre.d_position_d_gyro_bias;
  A_i.block<3, 3>(6, 12) = -pre.d_position_d_accel_bias;
  A_j.block<3, 3>(6, 3) = R_it;

  // Whitening: sqrt information of the preintegration covariance.
  const Eigen::Matrix<double, 9, 9> L = pre.covariance.llt().matrixL();
  const Eigen::Matrix<double, 9, 9> W =
      L.triangularView<Eigen::Lower>().solve(
          Eigen::Matrix<double, 9, 9>::Identity());

  InertialResidual out;
  Eigen::Matrix<double, 9, 1> r9;
  r9 << r_R, r_v, r_p;
  out.r.setZero();
  out.J_i.setZero();
  out.J_j.setZero();
  out.r.head<9>() = W * r9;
  out.J_i.block<9, 15>(0, 0) = W * A_i;
  out.J_j.block<9, 15>(0, 0) = W * A_j;

  // Bias random walk between the two states.
  const double sg = 1.0 / (pre.noise.gyro_bias_walk * std::sqrt(dt));
  const double sa = 1.0 / (pre.noise.accel_bias_walk * std::sqrt(dt));
  out.r.segment<3>(9) = sg * (state_j.bias.gyro - state_i.bias.gyro);
  out.r.segment<3>(12) = sa * (state_j.bias.accel - state_i.bias.accel);
  out.J_i.block<3, 3>(9, 9) = -sg * Eigen::Matrix3d::Identity();
  out.J_j.block<3, 3>(9, 9) = sg * Eigen::Matrix3d::Identity();
  out.J_i.block<3, 3>(12, 12) = -sa * Eigen::Matrix3d::Identity();
  out.J_j.block<3, 3>(12, 12) = sa * Eigen::Matrix3d::Identity();
  return out;
}

}  // namespace railodo::est
