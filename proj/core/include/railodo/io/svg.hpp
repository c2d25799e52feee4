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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "railodo/trajectory.hpp"

namespace railodo::io {

struct SvgPath {
  std::string label;
  std::vector<Eigen::Vector2d> points;  // world x (east) / y (north), meters
};

// Top-down (x-y) plot of the given polylines with a shared scale, legend,
// and 100 m grid. Deterministic output for equal inputs.
void write_paths_svg(const std::string& path, const std::vector<SvgPath>& paths);

// Convenience: project a trajectory onto the horizontal plane.
SvgPath svg_path_from_trajectory(const std::string& label,
                                 const Trajectory& traj);

}  // namespace railodo::io
