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

#include "railodo/pose.hpp"

#include <cmath>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo {

Pose compose(const Pose& T_a_b, const Pose& T_b_c) {
  Pose out;
  out.rotation = (T_a_b.rotation * T_b_c.rotation).normalized();
  out.translation = T_a_b.rotation * T_b_c.translation + T_a_b.translation;
  return out;
}

Pose inverse(const Pose& T_a_b) {
  Pose out;
  out.rotation = T_a_b.rotation.conjugate();
  out.translation = -(out.rotation * T_a_b.translation);
  return out;
}

Pose retract(const Pose& T, const Eigen::Vector3d& dtheta,
             const Eigen::Vector3d& dp) {
  Pose out;
  out.rotation = (T.rotation * quat_exp(dtheta)).normalized();
  out.translation = T.translation + dp;
  return out;
}

double heading_of(const Pose& T_world_body) {
  const Eigen::Vector3d x_world =
      T_world_body.rotation * Eigen::Vector3d::UnitX();
  // Angle from vertical below 1e-6 rad means the horizontal projection
  // has norm below sin(1e-6) ~ 1e-6; heading is then undefined.
  const double horiz = std::hypot(x_world.x(), x_world.y());
  if (horiz < std::sin(1e-6)) {
    throw GimbalDegenerate("heading_of: body x-axis within 1e-6 rad of vertical");
  }
  double psi = std::atan2(x_world.y(), x_world.x());
  return wrap_angle(psi);
}

}  // namespace railodo
