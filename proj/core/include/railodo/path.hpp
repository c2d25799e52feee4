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

#include <vector>

#include <Eigen/Core>

namespace railodo {

// Planar track elements chained head to tail. Elements are relative: each
// one starts at the previous element's end point and heading, so tangent
// continuity holds by construction.
struct PathElement {
  enum class Kind { kStraight, kArc };
  Kind kind = Kind::kStraight;
  double length = 0.0;  // straight only, meters, > 0
  double radius = 0.0;  // arc only, meters, > 0
  double angle = 0.0;   // arc only, radians, signed (+ left), != 0
};

struct PathSpec {
  std::vector<PathElement> elements;
};

// Arc-length parameterized planar track. The path starts at the origin with
// heading 0 (along +x); z is 0 everywhere.
class RailPath {
 public:
  struct Sample {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double heading = 0.0;    // radians, (-pi, pi] not enforced here
    double curvature = 0.0;  // signed, 1/m
  };

  double total_length() const { return total_length_; }

  // Evaluates the path at arc length s in [0, total_length()].
  Sample at(double s) const;

 private:
  friend RailPath build_path(const PathSpec& spec);

  struct Piece {
    double s_start = 0.0;
    double length = 0.0;
    Eigen::Vector2d p0 = Eigen::Vector2d::Zero();
    double psi0 = 0.0;
    double curvature = 0.0;  // 0 for straights
  };
  std::vector<Piece> pieces_;
  double total_length_ = 0.0;
};

// Validates the spec (positive lengths and radii, nonzero arc angles,
// at least one element) and assembles the chained path. Throws ConfigError
// on invalid elements.
RailPath build_path(const PathSpec& spec);

}  // namespace railodo
