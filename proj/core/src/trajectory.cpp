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

#include "railodo/trajectory.hpp"

#include "railodo/error.hpp"

namespace railodo {

void check_monotonic(const Trajectory& traj) {
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (!(traj[i].t > traj[i - 1].t)) {
      throw NonMonotonicTimestamps("trajectory timestamps must strictly increase");
    }
  }
}

std::vector<double> arc_lengths(const Trajectory& traj) {
  std::vector<double> s(traj.size(), 0.0);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    s[i] = s[i - 1] +
           (traj[i].pose.translation - traj[i - 1].pose.translation).norm();
  }
  return s;
}

}  // namespace railodo
