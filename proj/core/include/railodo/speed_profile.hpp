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

namespace railodo {

// Piecewise speed-vs-time profile made of constant-speed holds and linear
// ramps. Speeds are nonnegative; junction speeds must agree to 1e-9.
struct SpeedElement {
  enum class Kind { kHold, kRamp };
  Kind kind = Kind::kHold;
  double v0 = 0.0;       // start speed (hold: the speed)
  double v1 = 0.0;       // end speed (ramp only)
  double duration = 0.0; // seconds, > 0
};

struct SpeedProfileSpec {
  std::vector<SpeedElement> elements;
};

class SpeedProfile {
 public:
  double duration() const { return duration_; }
  double total_distance() const { return total_distance_; }

  // All queries take t in [0, duration()].
  double speed(double t) const;
  double accel(double t) const;
  double distance(double t) const;

 private:
  friend SpeedProfile build_profile(const SpeedProfileSpec& spec);

  struct Piece {
    double t_start = 0.0;
    double duration = 0.0;
    double v0 = 0.0;
    double a = 0.0;
    double s_start = 0.0;
  };
  std::vector<Piece> pieces_;
  double duration_ = 0.0;
  double total_distance_ = 0.0;

  const Piece& piece_at(double t) const;
};

// Throws ConfigError on empty specs, nonpositive durations, negative speeds,
// or speed discontinuities at junctions.
SpeedProfile build_profile(const SpeedProfileSpec& spec);

}  // namespace railodo
