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

#include "railodo/speed_profile.hpp"

#include <cmath>

#include "railodo/error.hpp"

namespace railodo {

SpeedProfile build_profile(const SpeedProfileSpec& spec) {
  if (spec.elements.empty()) {
    throw ConfigError("build_profile: profile needs at least one element");
  }
  SpeedProfile out;
  double t = 0.0;
  double s = 0.0;
  double v_prev = spec.elements.front().v0;
  for (const SpeedElement& e : spec.elements) {
    if (!(e.duration > 0.0)) {
      throw ConfigError("build_profile: element duration must be positive");
    }
    const double v_end = e.kind == SpeedElement::Kind::kHold ? e.v0 : e.v1;
    if (e.v0 < 0.0 || v_end < 0.0) {
      throw ConfigError("build_profile: speeds must be nonnegative");
    }
    if (std::abs(e.v0 - v_prev) > 1e-9) {
      throw ConfigError("build_profile: speed discontinuity at element junction");
    }
    SpeedProfile::Piece piece;
    piece.t_start = t;
    piece.duration = e.duration;
    piece.v0 = e.v0;
    piece.a = e.kind == SpeedElement::Kind::kHold
                  ? 0.0
                  : (e.v1 - e.v0) / e.duration;
    piece.s_start = s;
    out.pieces_.push_back(piece);
    s += e.v0 * e.duration + 0.5 * piece.a * e.duration * e.duration;
    t += e.duration;
    v_prev = v_end;
  }
  out.duration_ = t;
  out.total_distance_ = s;
  return out;
}

const SpeedProfile::Piece& SpeedProfile::piece_at(double t) const {
  if (t < -1e-9 || t > duration_ + 1e-9) {
    throw Error("SpeedProfile: time out of range");
  }
  std::size_t lo = 0;
  std::size_t hi = pieces_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (pieces_[mid].t_start <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return pieces_[lo];
}

double SpeedProfile::speed(double t) const {
  const Piece& p = piece_at(t);
  return p.v0 + p.a * (t - p.t_start);
}

double SpeedProfile::accel(double t) const {
  return piece_at(t).a;
}

double SpeedProfile::distance(double t) const {
  const Piece& p = piece_at(t);
  const double u = std::min(std::max(t - p.t_start, 0.0), p.duration);
  return p.s_start + p.v0 * u + 0.5 * p.a * u * u;
}

}  // namespace railodo
