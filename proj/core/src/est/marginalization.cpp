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

#include "railodo/est/marginalization.hpp"

#include <Eigen/Eigenvalues>

#include "railodo/error.hpp"

namespace railodo::est {

void schur_marginalize(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                       int m, Eigen::MatrixXd* H_out, Eigen::VectorXd* b_out) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n || b.size() != n || m < 0 || m > n) {
    throw Error("schur_marginalize: inconsistent dimensions");
  }
  const int k = n - m;
  if (m == 0) {
    *H_out = H;
    *b_out = b;
    return;
  }
  // Symmetrize against accumulation noise before decomposing.
  const Eigen::MatrixXd H_mm =
      0.5 * (H.topLeftCorner(m, m) + H.topLeftCorner(m, m).transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H_mm);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double clip = ev.cwiseAbs().maxCoeff() * 1e-12;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (ev(i) > clip) {
      inv(i) = 1.0 / ev(i);
    }
  }
  const Eigen::MatrixXd H_mm_pinv =
      eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

  const Eigen::MatrixXd H_km = H.bottomLeftCorner(k, m);
  *H_out = H.bottomRightCorner(k, k) - H_km * H_mm_pinv * H_km.transpose();
  *H_out = 0.5 * (*H_out + H_out->transpose());
  *b_out = b.tail(k) - H_km * H_mm_pinv * b.head(m);
}

PriorFactor factor_prior(const Eigen::MatrixXd& H, const Eigen::VectorXd& b,
                         double rel_tol) {
  const int n = static_cast<int>(H.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 *
                                                     (H + H.transpose()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double max_ev = n > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double clip = max_ev * rel_tol;

  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (ev(i) > clip && ev(i) > 0.0) {
      ++rank;
    }
  }
  PriorFactor out;
  out.sqrt_info.resize(rank, n);
  out.r0.resize(rank);
  int row = 0;
  // Eigenvalues come sorted ascending; keep the top `rank`.
  for (int i = n - rank; i < n; ++i) {
    const double s = std::sqrt(ev(i));
    out.sqrt_info.row(row) = s * eig.eigenvectors().col(i).transpose();
    out.r0(row) = -eig.eigenvectors().col(i).dot(b) / s;
    ++row;
  }
  return out;
}

}  // namespace railodo::est
