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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace railodo {

// Rigid transform. By convention a Pose named T_a_b maps points expressed in
// frame b to frame a: p_a = T_a_b * p_b. Trajectory poses are world-from-body.
//
// World frame: x/y horizontal, z up. Body frame: x forward, y left, z up.
// Quaternions are Hamilton, stored unit-norm (kept within 1e-9 of 1; every
// composition or update re-normalizes).
struct Pose {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
      : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return Pose(); }

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

  // Transforms a point: p_a = R * p_b + t.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

// T_a_c = T_a_b * T_b_c.
Pose compose(const Pose& T_a_b, const Pose& T_b_c);

// T_b_a from T_a_b.
Pose inverse(const Pose& T_a_b);

// Right-multiplies by exp of a twist [dtheta, dp]: rotation <- R * exp(dtheta),
// translation <- t + dp (dp expressed in the parent frame).
Pose retract(const Pose& T, const Eigen::Vector3d& dtheta,
             const Eigen::Vector3d& dp);

// Yaw angle of the body x-axis projected to the world horizontal plane,
// in (-pi, pi]. Throws GimbalDegenerate when the body x-axis is within
// 1e-6 rad of vertical.
double heading_of(const Pose& T_world_body);

}  // namespace railodo
