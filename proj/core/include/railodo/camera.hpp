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

#include <cstdint>

#include <Eigen/Core>

#include "railodo/pose.hpp"

namespace railodo {

// Pinhole camera, no distortion. Camera frame: z forward (optical axis),
// x right, y down. Pixel origin at the top-left corner.
struct CameraIntrinsics {
  double fx = 979.5;
  double fy = 979.5;
  double cx = 960.0;
  double cy = 600.0;
  int width = 1920;
  int height = 1200;
};

// Two-camera rig. T_cam0_cam1 maps cam1 points into cam0. For the standard
// rectified rig this is the identity rotation with translation
// (baseline, 0, 0): cam1 sits to the right of cam0 along the pixel u-axis.
struct StereoRig {
  Pose T_cam0_cam1 = Pose(Eigen::Quaterniond::Identity(),
                          Eigen::Vector3d(0.31, 0.0, 0.0));

  double baseline() const { return T_cam0_cam1.translation.norm(); }

  // True when the rig rotation is the identity and the offset is pure x,
  // within tol; enables the closed-form disparity fast path.
  bool fronto_parallel(double tol = 1e-12) const;
};

struct Landmark {
  std::int64_t id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // world frame
};

struct PixelProjection {
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
  bool in_image = false;
};

// Projects a world point through T_camera_world. Throws BehindCamera when
// the camera-frame z is at or below 1e-6. in_image is true when the pixel
// lies inside [0, width) x [0, height).
PixelProjection project(const CameraIntrinsics& K, const Pose& T_camera_world,
                        const Eigen::Vector3d& p_world);

// Back-projects a pixel at the given depth (camera-frame z) to a
// camera-frame point.
Eigen::Vector3d unproject(const CameraIntrinsics& K,
                          const Eigen::Vector2d& pixel, double depth);

struct StereoPoint {
  Eigen::Vector3d point_cam0 = Eigen::Vector3d::Zero();
  double depth = 0.0;  // cam0 z
};

// Triangulates a stereo match. Fronto-parallel rigs use the closed form
//   z = fx * baseline / (u0 - u1)
// and require positive disparity; otherwise the linear midpoint method is
// used. Throws DegenerateRay for parallel rays (direction cross product
// below 1e-12) or non-positive disparity.
StereoPoint triangulate_stereo(const StereoRig& rig,
                               const CameraIntrinsics& K0,
                               const CameraIntrinsics& K1,
                               const Eigen::Vector2d& px0,
                               const Eigen::Vector2d& px1);

// First-order stereo depth noise model: sigma_d = d^2 * sigma_px * sqrt(2)
// / (fx * baseline).
double depth_sigma(double depth, double pixel_sigma, double fx,
                   double baseline);

// Axis-aligned pixel rectangle, [u0, u1) x [v0, v1).
struct PixelRect {
  double u0 = 0.0;
  double v0 = 0.0;
  double u1 = 0.0;
  double v1 = 0.0;

  bool contains(const Eigen::Vector2d& px) const {
    return px.x() >= u0 && px.x() < u1 && px.y() >= v0 && px.y() < v1;
  }
};

}  // namespace railodo
