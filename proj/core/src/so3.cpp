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

#include "railodo/so3.hpp"

#include <cmath>

namespace railodo {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return S;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d S = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + S + 0.5 * S * S;
  }
  const double s = std::sin(theta) / theta;
  const double c = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + s * S + c * S * S;
}

Eigen::Quaterniond quat_exp(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  if (theta < kSmallAngle) {
    // w = cos(theta/2), v = sinc(theta/2)/2 * phi to second order.
    Eigen::Quaterniond q(1.0 - theta * theta / 8.0,
                         0.5 * phi.x(), 0.5 * phi.y(), 0.5 * phi.z());
    q.normalize();
    return q;
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half) / theta;
  return Eigen::Quaterniond(std::cos(half),
                            s * phi.x(), s * phi.y(), s * phi.z());
}

Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const Eigen::Vector3d v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  if (vn < 0.5 * kSmallAngle) {
    // theta ~ 2 * vn / w; direction v. Second-order accurate near identity.
    return (2.0 / q.w()) * v;
  }
  const double theta = 2.0 * std::atan2(vn, q.w());
  return (theta / vn) * v;
}

Eigen::Vector3d log_so3(const Eigen::Matrix3d& R) {
  return quat_log(Eigen::Quaterniond(R));
}

Eigen::Matrix3d right_jacobian_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d S = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() - 0.5 * S + (1.0 / 6.0) * S * S;
  }
  const double t2 = theta * theta;
  const double a = (1.0 - std::cos(theta)) / t2;
  const double b = (theta - std::sin(theta)) / (t2 * theta);
  return Eigen::Matrix3d::Identity() - a * S + b * S * S;
}

Eigen::Matrix3d right_jacobian_inv_so3(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d S = skew(phi);
  if (theta < kSmallAngle) {
    return Eigen::Matrix3d::Identity() + 0.5 * S + (1.0 / 12.0) * S * S;
  }
  const double half = 0.5 * theta;
  const double cot = 1.0 / std::tan(half);
  const double b = (1.0 / (theta * theta)) - cot / (2.0 * theta);
  return Eigen::Matrix3d::Identity() + 0.5 * S + b * S * S;
}

double wrap_angle(double a) {
  // Maps to (-pi, pi].
  const double two_pi = 2.0 * M_PI;
  double w = a - two_pi * std::floor((a + M_PI) / two_pi);
  if (w <= -M_PI) {
    w += two_pi;
  }
  return w;
}

}  // namespace railodo
