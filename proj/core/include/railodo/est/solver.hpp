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

#include "railodo/est/window.hpp"

namespace railodo::est {

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> accepted_costs;  // non-increasing by construction
  int n_reprojection = 0;
  int n_depth = 0;
  int n_depth_gated = 0;
  int n_behind_camera = 0;  // residual blocks dropped during assembly
};

// Levenberg-Marquardt with dense landmark elimination (Schur complement
// over 3x3 landmark blocks) and robust (Huber) reprojection/depth terms.
// Terminates on relative cost decrease < rel_decrease_tol, step norm
// < step_tol, or max_iterations. Throws RankDeficient when no gauge
// mechanism is active, EmptyWindow on an empty state vector, and
// SolverDiverged when the cost is not finite and cannot be reduced at
// maximum damping.
SolveReport solve_window(WindowProblem& wp, const EstimatorConfig& config);

// Removes the oldest keyframe. Every well-constrained landmark it observes
// is eliminated with it, together with all of that landmark's current
// observations, into a dense prior over the remaining keyframes; the
// consumed landmarks are erased so a continuing track re-enters as a fresh
// unknown. Jacobians are evaluated at the current estimates, which become
// the prior's linearization points.
void marginalize_oldest(WindowProblem& wp, const EstimatorConfig& config);

}  // namespace railodo::est
