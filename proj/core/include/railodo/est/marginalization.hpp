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

#include <Eigen/Core>

namespace railodo::est {

// Gaussian elimination of the leading m dimensions of the normal-equation
// pair (H, b), where H x = b and the retained cost is
//   0.5 x^T H x - b^T x  (up to a constant).
// H must be symmetric positive semidefinite. The marginalized block is
// pseudo-inverted (symmetric eigendecomposition, relative rank clip), so
// zero-information directions inside it are dropped rather than amplified.
void schur_marginalize(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                       int m, Eigen::MatrixXd* H_out, Eigen::VectorXd* b_out);

// Square-root factorization of a (possibly rank-deficient) information
// pair: finds S (rank x n) and r0 with S^T S = H and S^T r0 = -b, so the
// quadratic cost 0.5 |S dx + r0|^2 reproduces 0.5 dx^T H dx - b^T dx.
// Eigenvalues below rel_tol * max_eigenvalue are treated as zero.
struct PriorFactor {
  Eigen::MatrixXd sqrt_info;  // rank x n
  Eigen::VectorXd r0;         // rank
};

PriorFactor factor_prior(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                         double rel_tol = 1e-12);

}  // namespace railodo::est
