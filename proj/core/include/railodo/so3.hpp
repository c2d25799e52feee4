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

// SO(3) helpers. Rotation vectors use the angle-axis convention
// (right-handed, radians). All maps switch to a second-order Taylor
// expansion below an angle of 1e-8 rad.

inline constexpr double kSmallAngle = 1e-8;

// Skew-symmetric matrix such that skew(a) * b == a x b.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

// Exponential map so(3) -> SO(3).
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi);

// Exponential map returning a unit quaternion.
Eigen::Quaterniond quat_exp(const Eigen::Vector3d& phi);

// Logarithm map SO(3) -> so(3). Input must be a rotation matrix.
Eigen::Vector3d log_so3(const Eigen::Matrix3d& R);

// Logarithm of a unit quaternion (sign-stabilized, w >= 0 branch).
Eigen::Vector3d quat_log(const Eigen::Quaterniond& q);

// Right Jacobian of exp_so3: exp(phi + dphi) ~ exp(phi) exp(Jr(phi) dphi).
Eigen::Matrix3d right_jacobian_so3(const Eigen::Vector3d& phi);

// Inverse of the right Jacobian.
Eigen::Matrix3d right_jacobian_inv_so3(const Eigen::Vector3d& phi);

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace railodo
