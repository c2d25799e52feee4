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

#include "railodo/pose.hpp"
#include "railodo/trajectory.hpp"

namespace railodo::eval {

struct PairedSample {
  double t = 0.0;  // ground-truth timestamp
  Pose gt;
  Pose est;
};

struct Association {
  std::vector<PairedSample> pairs;
  int n_unmatched_gt = 0;
  int n_unmatched_est = 0;
};

// Pairs each ground-truth sample with the nearest estimate within max_dt
// seconds (injective, both inputs must be time-sorted). Throws NoOverlap
// when no pair exists.
Association associate(const Trajectory& est, const Trajectory& gt,
                      double max_dt = 0.025);

// Least-squares rigid fit (rotation + translation, no scale) mapping the
// est points onto the gt points: minimizes |gt_i - (R est_i + t)|^2.
// Collinear point sets get the minimal rotation taking the est principal
// direction to the gt principal direction, so identical inputs always map
// to the identity. Throws DegenerateAlignment when the points coincide
// (all within 1e-6 m of their centroid).
struct RigidFit {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

RigidFit fit_rigid(const std::vector<Eigen::Vector3d>& est,
                   const std::vector<Eigen::Vector3d>& gt);

Pose apply_fit(const RigidFit& fit, const Pose& pose);

struct SegmentError {
  double start_arclength = 0.0;
  double length = 0.0;             // nominal L
  double dist_pct = 0.0;           // endpoint gap / L * 100
  double heading_deg_per_m = 0.0;  // |wrapped heading-change error| / L
};

struct SegmentationResult {
  std::vector<SegmentError> segments;
  int n_degenerate_skipped = 0;  // alignment failures
};

// Splits the paired trajectory into consecutive segments of ground-truth
// chordal arc length L, aligns each on its first 10% of pairs (at least
// two), and reports endpoint distance and heading-change errors. Throws
// TrajectoryTooShort when not even one segment fits.
SegmentationResult segment_errors(const Association& assoc, double L,
                                  double align_fraction = 0.1);

struct ErrorStats {
  int count = 0;
  double median = 0.0;
  double rmse = 0.0;
};

// Median (midpoint-averaged for even counts) and RMSE. Throws
// EmptyErrorSet on an empty input.
ErrorStats aggregate(const std::vector<double>& errors);

}  // namespace railodo::eval
