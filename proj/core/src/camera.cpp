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

#include "railodo/camera.hpp"

#include <cmath>

#include "railodo/error.hpp"

namespace railodo {

namespace {
constexpr double kMinDepth = 1e-6;
constexpr double kParallelRayTol = 1e-12;
}  // namespace

bool StereoRig::fronto_parallel(double tol) const {
  const Eigen::Quaterniond& q = T_cam0_cam1.rotation;
  const double rot_dev = std::abs(1.0 - std::abs(q.w()));
  const Eigen::Vector3d& t = T_cam0_cam1.translation;
  return rot_dev < tol && std::abs(t.y()) < tol && std::abs(t.z()) < tol &&
         t.x() > 0.0;
}

PixelProjection project(const CameraIntrinsics& K, const Pose& T_camera_world,
                        const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p_cam = T_camera_world * p_world;
  if (p_cam.z() <= kMinDepth) {
    throw BehindCamera("project: point at or behind the camera plane");
  }
  PixelProjection out;
  out.pixel.x() = K.fx * p_cam.x() / p_cam.z() + K.cx;
  out.pixel.y() = K.fy * p_cam.y() / p_cam.z() + K.cy;
  out.in_image = out.pixel.x() >= 0.0 && out.pixel.x() < K.width &&
                 out.pixel.y() >= 0.0 && out.pixel.y() < K.height;
  return out;
}

Eigen::Vector3d unproject(const CameraIntrinsics& K,
                          const Eigen::Vector2d& pixel, double depth) {
  return Eigen::Vector3d((pixel.x() - K.cx) / K.fx * depth,
                         (pixel.y() - K.cy) / K.fy * depth, depth);
}

StereoPoint triangulate_stereo(const StereoRig& rig,
                               const CameraIntrinsics& K0,
                               const CameraIntrinsics& K1,
                               const Eigen::Vector2d& px0,
                               const Eigen::Vector2d& px1) {
  StereoPoint out;
  if (rig.fronto_parallel()) {
    const double disparity = px0.x() - px1.x();
    if (disparity <= 0.0) {
      throw DegenerateRay("triangulate_stereo: non-positive disparity");
    }
    const double z = K0.fx * rig.T_cam0_cam1.translation.x() / disparity;
    out.point_cam0 = unproject(K0, px0, z);
    out.depth = z;
    return out;
  }

  // Linear midpoint: closest point between the two viewing rays.
  const Eigen::Vector3d d0 =
      Eigen::Vector3d((px0.x() - K0.cx) / K0.fx, (px0.y() - K0.cy) / K0.fy, 1.0)
          .normalized();
  const Eigen::Vector3d d1_cam1 =
      Eigen::Vector3d((px1.x() - K1.cx) / K1.fx, (px1.y() - K1.cy) / K1.fy, 1.0)
          .normalized();
  const Eigen::Vector3d d1 = rig.T_cam0_cam1.rotation * d1_cam1;
  const Eigen::Vector3d o1 = rig.T_cam0_cam1.translation;

  if (d0.cross(d1).norm() < kParallelRayTol) {
    throw DegenerateRay("triangulate_stereo: rays are parallel");
  }

  // Solve [d0 -d1] [s; t] = o1 in the least-squares sense.
  Eigen::Matrix<double, 3, 2> A;
  A.col(0) = d0;
  A.col(1) = -d1;
  const Eigen::Vector2d st =
      (A.transpose() * A).ldlt().solve(A.transpose() * o1);
  const Eigen::Vector3d p0 = st.x() * d0;
  const Eigen::Vector3d p1 = o1 + st.y() * d1;
  out.point_cam0 = 0.5 * (p0 + p1);
  out.depth = out.point_cam0.z();
  if (out.depth <= kMinDepth) {
    throw DegenerateRay("triangulate_stereo: midpoint behind the camera");
  }
  return out;
}

double depth_sigma(double depth, double pixel_sigma, double fx,
                   double baseline) {
  return depth * depth * pixel_sigma * std::sqrt(2.0) / (fx * baseline);
}

}  // namespace railodo
