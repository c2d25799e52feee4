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

#include "railodo/pose.hpp"

namespace railodo {

struct TrajectorySample {
  double t = 0.0;  // seconds
  Pose pose;       // world-from-body
};

using Trajectory = std::vector<TrajectorySample>;

// Throws NonMonotonicTimestamps unless timestamps strictly increase.
void check_monotonic(const Trajectory& traj);

// Cumulative chordal arc length; element i is the length up to sample i
// (element 0 is 0).
std::vector<double> arc_lengths(const Trajectory& traj);

}  // namespace railodo
