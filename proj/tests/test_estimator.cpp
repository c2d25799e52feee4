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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "railodo/camera.hpp"
#include "railodo/est/residuals.hpp"
#include "railodo/imu/preintegration.hpp"
#include "railodo/so3.hpp"
#include "testutil.hpp"

using namespace railodo;
using namespace railodo::est;
using railodo::test::numeric_jacobian;
using railodo::test::random_pose;
using railodo::test::relative_error;
using railodo::test::TestRng;

namespace {

KeyframeState perturb_state(const KeyframeState& s,
                            const Eigen::VectorXd& d15) {
  KeyframeState out = s;
  out.pose = retract(s.pose, d15.segment<3>(0), d15.segment<3>(3));
  out.velocity += d15.segment<3>(6);
  out.bias.gyro += d15.segment<3>(9);
  out.bias.accel += d15.segment<3>(12);
  return out;
}

// Random but integrable IMU signal over [0, duration].
std::vector<imu::ImuSample> smooth_imu(TestRng& rng, double duration,
                                       double rate_hz) {
  const Eigen::Vector3d w0 = rng.vec3(0.3);
  const Eigen::Vector3d w1 = rng.vec3(0.2);
  const Eigen::Vector3d a0 = rng.vec3(1.0);
  const Eigen::Vector3d a1 = rng.vec3(0.5);
  const double f1 = rng.uniform(0.5, 2.0);
  const double f2 = rng.uniform(0.5, 2.0);
  std::vector<imu::ImuSample> samples;
  const int n = static_cast<int>(std::round(duration * rate_hz));
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    imu::ImuSample s;
    s.t = t;
    s.gyro = w0 + w1 * std::sin(2.0 * M_PI * f1 * t);
    s.accel = a0 + a1 * std::cos(2.0 * M_PI * f2 * t);
    samples.push_back(s);
  }
  return samples;
}

}  // namespace

TEST_CASE("reprojection residual Jacobians match central differences") {
  TestRng rng(71);
  const CameraIntrinsics K;
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Pose T_wb = random_pose(rng, 0.4, 10.0);
    const Pose T_bc = random_pose(rng, 0.3, 0.5);
    // Landmark safely in front of the camera.
    const Eigen::Vector3d p_cam(rng.uniform(-8.0, 8.0), rng.uniform(-5.0, 5.0),
                                rng.uniform(2.0, 60.0));
    const Eigen::Vector3d lm = T_wb * (T_bc * p_cam);
    const Eigen::Vector2d pixel(rng.uniform(0.0, 1920.0),
                                rng.uniform(0.0, 1200.0));
    const double sigma = rng.uniform(0.3, 2.0);

    const ReprojectionResidual res =
        reprojection_residual(T_wb, T_bc, K, lm, pixel, sigma);

    const auto f = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
      const Pose T = retract(T_wb, d.segment<3>(0), d.segment<3>(3));
      const Eigen::Vector3d l = lm + d.segment<3>(6);
      return reprojection_residual(T, T_bc, K, l, pixel, sigma).r;
    };
    const Eigen::MatrixXd J_fd = numeric_jacobian(f, 9);
    Eigen::MatrixXd J_an(2, 9);
    J_an << res.J_theta, res.J_p, res.J_l;
    CHECK(relative_error(J_an, J_fd) <= 1e-5);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("depth residual Jacobians match central differences") {
  TestRng rng(72);
  const CameraIntrinsics K;
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 150; ++trial) {
    const Pose T_wb = random_pose(rng, 0.4, 10.0);
    const Pose T_bc = random_pose(rng, 0.3, 0.5);
    const Eigen::Vector3d p_cam(rng.uniform(-8.0, 8.0), rng.uniform(-5.0, 5.0),
                                rng.uniform(2.0, 40.0));
    const Eigen::Vector3d lm = T_wb * (T_bc * p_cam);
    DepthModel model;
    model.weight = rng.uniform(0.2, 4.0);
    model.cutoff_factor = 40.0;
    model.pixel_sigma = rng.uniform(0.3, 2.0);
    const double baseline = rng.uniform(0.2, 1.3);
    const double measured = p_cam.z() * rng.uniform(0.8, 1.2);

    const std::optional<DepthResidual> res =
        depth_residual(T_wb, T_bc, K, lm, measured, baseline, model);
    if (!res.has_value()) {
      continue;  // gated
    }

    const auto f = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
      const Pose T = retract(T_wb, d.segment<3>(0), d.segment<3>(3));
      const Eigen::Vector3d l = lm + d.segment<3>(6);
      const std::optional<DepthResidual> r =
          depth_residual(T, T_bc, K, l, measured, baseline, model);
      REQUIRE(r.has_value());
      return Eigen::VectorXd::Constant(1, r->r);
    };
    const Eigen::MatrixXd J_fd = numeric_jacobian(f, 9);
    Eigen::MatrixXd J_an(1, 9);
    J_an << res->J_theta, res->J_p, res->J_l;
    CHECK(relative_error(J_an, J_fd) <= 1e-5);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("inertial residual Jacobians match central differences") {
  TestRng rng(73);
  const Eigen::Vector3d gravity(0.0, 0.0, -9.81);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const double duration = rng.uniform(0.05, 0.4);
    const std::vector<imu::ImuSample> samples =
        smooth_imu(rng, duration, 200.0);
    imu::ImuBias bias_lin;
    bias_lin.gyro = rng.vec3(0.01);
    bias_lin.accel = rng.vec3(0.05);
    imu::ImuNoiseParams noise;
    const imu::PreintegratedImu pre = imu::integrate(
        std::span<const imu::ImuSample>(samples.data(), samples.size()), noise,
        bias_lin);

    KeyframeState si;
    si.t = 0.0;
    si.pose = random_pose(rng, 0.5, 5.0);
    si.velocity = rng.vec3(4.0);
    si.bias.gyro = bias_lin.gyro + rng.vec3(0.004);
    si.bias.accel = bias_lin.accel + rng.vec3(0.02);

    // End state near the prediction so residuals stay moderate.
    const imu::NavState pred = imu::predict_state(
        {si.pose, si.velocity}, si.bias, pre, gravity);
    KeyframeState sj;
    sj.t = pre.dt;
    sj.pose = retract(pred.pose, rng.vec3(0.01), rng.vec3(0.05));
    sj.velocity = pred.velocity + rng.vec3(0.1);
    sj.bias.gyro = si.bias.gyro + rng.vec3(0.001);
    sj.bias.accel = si.bias.accel + rng.vec3(0.005);

    const InertialResidual res = inertial_residual(si, sj, pre, gravity);

    const auto fi = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
      return inertial_residual(perturb_state(si, d), sj, pre, gravity).r;
    };
    const auto fj = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
      return inertial_residual(si, perturb_state(sj, d), pre, gravity).r;
    };
    const double tol = 1e-5;
    CHECK(relative_error(res.J_i, numeric_jacobian(fi, 15)) <= tol);
    CHECK(relative_error(res.J_j, numeric_jacobian(fj, 15)) <= tol);
    ++checked;
  }
  CHECK(checked >= 100);
}
