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

#include "railodo/eval/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo::eval {

Association associate(const Trajectory& est, const Trajectory& gt,
                      double max_dt) {
  check_monotonic(est);
  check_monotonic(gt);
  Association out;
  std::size_t j = 0;
  std::size_t last_used = 0;
  bool any_used = false;
  for (const TrajectorySample& g : gt) {
    // Advance to the estimate sample nearest in time.
    while (j + 1 < est.size() &&
           std::abs(est[j + 1].t - g.t) <= std::abs(est[j].t - g.t)) {
      ++j;
    }
    if (est.empty() || std::abs(est[j].t - g.t) > max_dt ||
        (any_used && j == last_used)) {
      ++out.n_unmatched_gt;
      continue;
    }
    out.pairs.push_back({g.t, g.pose, est[j].pose});
    last_used = j;
    any_used = true;
  }
  out.n_unmatched_est =
      static_cast<int>(est.size()) - static_cast<int>(out.pairs.size());
  if (out.n_unmatched_est < 0) {
    out.n_unmatched_est = 0;
  }
  if (out.pairs.empty()) {
    throw NoOverlap("associate: no estimate/ground-truth pairs within max_dt");
  }
  return out;
}

namespace {

// Minimal rotation taking unit vector a to unit vector b.
Eigen::Matrix3d minimal_rotation(const Eigen::Vector3d& a,
                                 const Eigen::Vector3d& b) {
  const Eigen::Vector3d axis = a.cross(b);
  const double s = axis.norm();
  const double c = a.dot(b);
  if (s < 1e-15) {
    if (c > 0.0) {
      return Eigen::Matrix3d::Identity();
    }
    // Opposite directions: rotate pi about any axis orthogonal to a.
    Eigen::Vector3d ortho = a.cross(Eigen::Vector3d::UnitX());
    if (ortho.norm() < 1e-6) {
      ortho = a.cross(Eigen::Vector3d::UnitY());
    }
    return exp_so3(M_PI * ortho.normalized());
  }
  const double angle = std::atan2(s, c);
  return exp_so3(angle * (axis / s));
}

}  // namespace

RigidFit fit_rigid(const std::vector<Eigen::Vector3d>& est,
                   const std::vector<Eigen::Vector3d>& gt) {
  if (est.size() != gt.size() || est.size() < 2) {
    throw DegenerateAlignment("fit_rigid: need at least two point pairs");
  }
  const double n = static_cast<double>(est.size());
  Eigen::Vector3d c_est = Eigen::Vector3d::Zero();
  Eigen::Vector3d c_gt = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < est.size(); ++i) {
    c_est += est[i];
    c_gt += gt[i];
  }
  c_est /= n;
  c_gt /= n;

  // Cross covariance; columns live in gt space after the SVD below.
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
  double spread_est = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    C += (est[i] - c_est) * (gt[i] - c_gt).transpose();
    spread_est = std::max(spread_est, (est[i] - c_est).norm());
  }
  if (spread_est < 1e-6) {
    throw DegenerateAlignment("fit_rigid: window positions coincide");
  }

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      C, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sv = svd.singularValues();

  RigidFit fit;
  if (sv(1) <= 1e-9 * sv(0)) {
    // Collinear windows: the full Kabsch problem is ill-posed; use the
    // minimal rotation between the principal directions so that identical
    // trajectories align with the identity.
    fit.R = minimal_rotation(svd.matrixU().col(0), svd.matrixV().col(0));
  } else {
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant();
    fit.R = svd.matrixV() * D * svd.matrixU().transpose();
  }
  fit.t = c_gt - fit.R * c_est;
  return fit;
}

Pose apply_fit(const RigidFit& fit, const Pose& pose) {
  Pose out;
  out.rotation = (Eigen::Quaterniond(fit.R) * pose.rotation).normalized();
  out.translation = fit.R * pose.translation + fit.t;
  return out;
}

SegmentationResult segment_errors(const Association& assoc, double L,
                                  double align_fraction) {
  if (!(L > 0.0)) {
    throw Error("segment_errors: segment length must be positive");
  }
  const std::vector<PairedSample>& pairs = assoc.pairs;

  // Chordal arc length over the paired ground truth.
  std::vector<double> s(pairs.size(), 0.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    s[i] = s[i - 1] +
           (pairs[i].gt.translation - pairs[i - 1].gt.translation).norm();
  }
  const double total = pairs.empty() ? 0.0 : s.back();
  const int n_segments = static_cast<int>(std::floor((total + 1e-9) / L));
  if (n_segments < 1) {
    throw TrajectoryTooShort("segment_errors: trajectory shorter than one segment");
  }

  // Breakpoint k: first pair at arc length >= k * L.
  std::vector<std::size_t> brk(static_cast<std::size_t>(n_segments) + 1);
  std::size_t cursor = 0;
  for (int k = 0; k <= n_segments; ++k) {
    const double target = static_cast<double>(k) * L - 1e-9;
    while (cursor < s.size() && s[cursor] < target) {
      ++cursor;
    }
    brk[static_cast<std::size_t>(k)] = std::min(cursor, s.size() - 1);
  }

  SegmentationResult out;
  for (int k = 0; k < n_segments; ++k) {
    const std::size_t i0 = brk[static_cast<std::size_t>(k)];
    const std::size_t i1 = brk[static_cast<std::size_t>(k) + 1];
    if (i1 <= i0) {
      ++out.n_degenerate_skipped;
      continue;
    }
    const std::size_t count = i1 - i0 + 1;
    const std::size_t n_align = std::max<std::size_t>(
        2, static_cast<std::size_t>(
               std::ceil(align_fraction * static_cast<double>(count))));

    std::vector<Eigen::Vector3d> e_pts;
    std::vector<Eigen::Vector3d> g_pts;
    for (std::size_t i = i0; i < i0 + std::min(n_align, count); ++i) {
      e_pts.push_back(pairs[i].est.translation);
      g_pts.push_back(pairs[i].gt.translation);
    }

    RigidFit fit;
    try {
      fit = fit_rigid(e_pts, g_pts);
    } catch (const DegenerateAlignment&) {
      ++out.n_degenerate_skipped;
      continue;
    }

    const Pose est_start = apply_fit(fit, pairs[i0].est);
    const Pose est_end = apply_fit(fit, pairs[i1].est);

    SegmentError seg;
    seg.start_arclength = s[i0];
    seg.length = L;
    seg.dist_pct =
        (est_end.translation - pairs[i1].gt.translation).norm() / L * 100.0;

    try {
      const double dpsi_est =
          wrap_angle(heading_of(est_end) - heading_of(est_start));
      const double dpsi_gt =
          wrap_angle(heading_of(pairs[i1].gt) - heading_of(pairs[i0].gt));
      seg.heading_deg_per_m =
          std::abs(wrap_angle(dpsi_est - dpsi_gt)) * (180.0 / M_PI) / L;
    } catch (const GimbalDegenerate&) {
      ++out.n_degenerate_skipped;
      continue;
    }
    out.segments.push_back(seg);
  }
  return out;
}

ErrorStats aggregate(const std::vector<double>& errors) {
  if (errors.empty()) {
    throw EmptyErrorSet("aggregate: empty error set");
  }
  ErrorStats out;
  out.count = static_cast<int>(errors.size());
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  out.median = (n % 2 == 1) ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double ss = 0.0;
  for (double e : sorted) {
    ss += e * e;
  }
  out.rmse = std::sqrt(ss / static_cast<double>(n));
  return out;
}

}  // namespace railodo::eval
