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

#include <functional>
#include <random>

#include <Eigen/Core>

#include "railodo/pose.hpp"
#include "railodo/so3.hpp"

namespace railodo::test {

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  double gaussian(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(gen_);
  }
  Eigen::Vector3d vec3(double scale) {
    return Eigen::Vector3d(gaussian(scale), gaussian(scale), gaussian(scale));
  }
  std::mt19937_64& gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline Pose random_pose(TestRng& rng, double angle_scale, double trans_scale) {
  return Pose(Eigen::Quaterniond(quat_exp(rng.vec3(angle_scale))),
              rng.vec3(trans_scale));
}

// Central-difference Jacobian of r: R^dims -> R^m around zero, where `f`
// maps a tangent vector to the residual evaluated at x (+) delta.
inline Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, int dims,
    double h = 1e-6) {
  const Eigen::VectorXd r0 = f(Eigen::VectorXd::Zero(dims));
  Eigen::MatrixXd J(r0.size(), dims);
  for (int k = 0; k < dims; ++k) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dims);
    d(k) = h;
    const Eigen::VectorXd rp = f(d);
    d(k) = -h;
    const Eigen::VectorXd rm = f(d);
    J.col(k) = (rp - rm) / (2.0 * h);
  }
  return J;
}

inline double relative_error(const Eigen::MatrixXd& analytic,
                             const Eigen::MatrixXd& fd) {
  return (analytic - fd).norm() / std::max(1.0, fd.norm());
}

}  // namespace railodo::test
