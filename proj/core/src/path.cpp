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

#include "railodo/path.hpp"

#include <cmath>

#include "railodo/error.hpp"

namespace railodo {

RailPath build_path(const PathSpec& spec) {
  if (spec.elements.empty()) {
    throw ConfigError("build_path: path needs at least one element");
  }
  RailPath path;
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double psi = 0.0;
  double s = 0.0;
  for (const PathElement& e : spec.elements) {
    RailPath::Piece piece;
    piece.s_start = s;
    piece.p0 = p;
    piece.psi0 = psi;
    if (e.kind == PathElement::Kind::kStraight) {
      if (!(e.length > 0.0)) {
        throw ConfigError("build_path: straight length must be positive");
      }
      piece.length = e.length;
      piece.curvature = 0.0;
      p += e.length * Eigen::Vector2d(std::cos(psi), std::sin(psi));
    } else {
      if (!(e.radius > 0.0)) {
        throw ConfigError("build_path: arc radius must be positive");
      }
      if (e.angle == 0.0) {
        throw ConfigError("build_path: arc angle must be nonzero");
      }
      piece.length = e.radius * std::abs(e.angle);
      piece.curvature = (e.angle > 0.0 ? 1.0 : -1.0) / e.radius;
      const double k = piece.curvature;
      const double psi1 = psi + e.angle;
      p += Eigen::Vector2d((std::sin(psi1) - std::sin(psi)) / k,
                           (-std::cos(psi1) + std::cos(psi)) / k);
      psi = psi1;
    }
    s += piece.length;
    path.pieces_.push_back(piece);
  }
  path.total_length_ = s;
  return path;
}

RailPath::Sample RailPath::at(double s) const {
  if (s < -1e-9 || s > total_length_ + 1e-9) {
    throw Error("RailPath::at: arc length out of range");
  }
  s = std::min(std::max(s, 0.0), total_length_);
  // Locate the piece containing s (last piece is right-inclusive).
  std::size_t lo = 0;
  std::size_t hi = pieces_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].s_start <= s) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Piece& piece = pieces_[lo];
  const double u = s - piece.s_start;
  Sample out;
  out.curvature = piece.curvature;
  if (piece.curvature == 0.0) {
    out.heading = piece.psi0;
    out.position =
        piece.p0 + u * Eigen::Vector2d(std::cos(piece.psi0), std::sin(piece.psi0));
  } else {
    const double k = piece.curvature;
    const double psi = piece.psi0 + k * u;
    out.heading = psi;
    out.position =
        piece.p0 + Eigen::Vector2d((std::sin(psi) - std::sin(piece.psi0)) / k,
                                   (-std::cos(psi) + std::cos(piece.psi0)) / k);
  }
  return out;
}

}  // namespace railodo
