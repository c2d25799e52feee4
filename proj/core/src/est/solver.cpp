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

#include "railodo/est/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "railodo/error.hpp"
#include "railodo/est/marginalization.hpp"
#include "railodo/so3.hpp"

namespace railodo::est {

namespace {

constexpr double kLambdaInit = 1e-4;
constexpr double kLambdaMin = 1e-12;
constexpr double kLambdaMax = 1e10;

struct HuberTerm {
  double cost = 0.0;        // rho(|r|)
  double sqrt_weight = 1.0; // IRLS factor for r and J
};

HuberTerm huber(double norm, double delta) {
  HuberTerm out;
  if (norm <= delta) {
    out.cost = norm * norm;
    out.sqrt_weight = 1.0;
  } else {
    out.cost = 2.0 * delta * norm - delta * delta;
    out.sqrt_weight = std::sqrt(delta / norm);
  }
  return out;
}

// State/landmark values being evaluated (current or candidate).
struct Values {
  std::vector<KeyframeState> states;
  std::vector<Eigen::Vector3d> lm_pos;  // aligned with the active-id list
};

struct LmSystem {
  Eigen::Matrix3d Hll = Eigen::Matrix3d::Zero();
  Eigen::Vector3d bl = Eigen::Vector3d::Zero();
  // Pose-landmark couplings, one per observing keyframe.
  std::vector<std::pair<int, Eigen::Matrix<double, 6, 3>>> W;
};

struct Evaluation {
  double cost = 0.0;
  Eigen::MatrixXd H;  // keyframe-only block system
  Eigen::VectorXd b;
  std::vector<LmSystem> lm;
  int n_reprojection = 0;
  int n_depth = 0;
  int n_depth_gated = 0;
  int n_behind_camera = 0;
};

Eigen::Matrix<double, 6, 3>& coupling(LmSystem& sys, int kf) {
  for (auto& [k, W] : sys.W) {
    if (k == kf) {
      return W;
    }
  }
  sys.W.emplace_back(kf, Eigen::Matrix<double, 6, 3>::Zero());
  return sys.W.back().second;
}

// Tangent offset of keyframe k.
inline int kf_off(int k, int D) { return k * D; }

class Problem {
 public:
  Problem(const WindowProblem& wp, const EstimatorConfig& cfg)
      : wp_(wp), cfg_(cfg), D_(est::state_dim(wp.mode)) {
    for (const auto& [id, lm] : wp.landmarks) {
      if (lm.active) {
        active_ids_.push_back(id);
      }
    }
  }

  int state_dim() const { return D_; }
  int n_kf() const { return static_cast<int>(wp_.states.size()); }
  int kf_dims() const { return n_kf() * D_; }
  const std::vector<std::int64_t>& active_ids() const { return active_ids_; }

  Values current_values() const {
    Values v;
    v.states = wp_.states;
    v.lm_pos.reserve(active_ids_.size());
    for (std::int64_t id : active_ids_) {
      v.lm_pos.push_back(wp_.landmarks.at(id).position);
    }
    return v;
  }

  Values retract(const Values& v, const Eigen::VectorXd& dx_kf,
                 const std::vector<Eigen::Vector3d>& dx_lm) const {
    Values out = v;
    for (int k = 0; k < n_kf(); ++k) {
      const int off = kf_off(k, D_);
      KeyframeState& s = out.states[k];
      s.pose = railodo::retract(s.pose, dx_kf.segment<3>(off),
                                dx_kf.segment<3>(off + 3));
      if (uses_imu(wp_.mode)) {
        s.velocity += dx_kf.segment<3>(off + 6);
        s.bias.gyro += dx_kf.segment<3>(off + 9);
        s.bias.accel += dx_kf.segment<3>(off + 12);
      }
    }
    for (std::size_t i = 0; i < dx_lm.size(); ++i) {
      out.lm_pos[i] += dx_lm[i];
    }
    return out;
  }

  // Robust cost and (optionally) the Gauss-Newton system at `v`.
  Evaluation evaluate(const Values& v, bool build) const {
    Evaluation ev;
    if (build) {
      ev.H = Eigen::MatrixXd::Zero(kf_dims(), kf_dims());
      ev.b = Eigen::VectorXd::Zero(kf_dims());
      ev.lm.resize(active_ids_.size());
    }
    accumulate_vision(v, build, &ev);
    if (uses_imu(wp_.mode)) {
      accumulate_inertial(v, build, &ev);
    }
    if (wp_.prior.has_value()) {
      accumulate_prior(v, build, &ev);
    }
    return ev;
  }

 private:
  void add_pixel_block(const ReprojectionResidual& res, double delta, int kf,
                       std::size_t lm_idx, bool build, Evaluation* ev) const {
    const HuberTerm h = huber(res.r.norm(), delta);
    ev->cost += h.cost;
    if (!build) {
      return;
    }
    ++ev->n_reprojection;
    const double w = h.sqrt_weight;
    Eigen::Matrix<double, 2, 6> Jp;
    Jp << res.J_theta, res.J_p;
    Jp *= w;
    const Eigen::Matrix<double, 2, 3> Jl = w * res.J_l;
    const Eigen::Vector2d r = w * res.r;
    const int off = kf_off(kf, D_);
    ev->H.block<6, 6>(off, off) += Jp.transpose() * Jp;
    ev->b.segment<6>(off) -= Jp.transpose() * r;
    LmSystem& sys = ev->lm[lm_idx];
    sys.Hll += Jl.transpose() * Jl;
    sys.bl -= Jl.transpose() * r;
    coupling(sys, kf) += Jp.transpose() * Jl;
  }

  void accumulate_vision(const Values& v, bool build, Evaluation* ev) const {
    const double delta = cfg_.huber_pixels / cfg_.pixel_sigma;
    const bool stereo = wp_.mode != Mode::kMonoInertial;
    for (std::size_t i = 0; i < active_ids_.size(); ++i) {
      const WindowLandmark& lm = wp_.landmarks.at(active_ids_[i]);
      const Eigen::Vector3d& pos = v.lm_pos[i];
      for (const TrackObservation& obs : lm.obs) {
        const KeyframeState& s = v.states[obs.kf];
        ReprojectionResidual r0;
        try {
          r0 = reprojection_residual(s.pose, wp_.T_body_cam0, wp_.K, pos,
                                     obs.px0, cfg_.pixel_sigma);
        } catch (const BehindCamera&) {
          ++ev->n_behind_camera;
          continue;
        }
        add_pixel_block(r0, delta, obs.kf, i, build, ev);

        if (stereo && obs.px1.has_value()) {
          try {
            const ReprojectionResidual r1 =
                reprojection_residual(s.pose, wp_.T_body_cam1, wp_.K, pos,
                                      *obs.px1, cfg_.pixel_sigma);
            add_pixel_block(r1, delta, obs.kf, i, build, ev);
          } catch (const BehindCamera&) {
            ++ev->n_behind_camera;
          }
        }
        if (stereo && obs.depth.has_value()) {
          DepthModel model{cfg_.depth_weight, cfg_.depth_cutoff_factor,
                           cfg_.pixel_sigma};
          try {
            const std::optional<DepthResidual> rd =
                depth_residual(s.pose, wp_.T_body_cam0, wp_.K, pos, *obs.depth,
                               wp_.baseline, model);
            if (!rd.has_value()) {
              if (build) {
                ++ev->n_depth_gated;
              }
              continue;
            }
            const HuberTerm h = huber(std::abs(rd->r), delta);
            ev->cost += h.cost;
            if (build) {
              ++ev->n_depth;
              const double w = h.sqrt_weight;
              Eigen::Matrix<double, 1, 6> Jp;
              Jp << rd->J_theta, rd->J_p;
              Jp *= w;
              const Eigen::RowVector3d Jl = w * rd->J_l;
              const double r = w * rd->r;
              const int off = kf_off(obs.kf, D_);
              ev->H.block<6, 6>(off, off) += Jp.transpose() * Jp;
              ev->b.segment<6>(off) -= Jp.transpose() * r;
              LmSystem& sys = ev->lm[i];
              sys.Hll += Jl.transpose() * Jl;
              sys.bl -= Jl.transpose() * r;
              coupling(sys, obs.kf) += Jp.transpose() * Jl;
            }
          } catch (const BehindCamera&) {
            ++ev->n_behind_camera;
          }
        }
      }
    }
  }

  void accumulate_inertial(const Values& v, bool build, Evaluation* ev) const {
    for (std::size_t i = 0; i + 1 < v.states.size(); ++i) {
      const InertialResidual res = inertial_residual(
          v.states[i], v.states[i + 1], wp_.imu_links[i], wp_.gravity_world);
      ev->cost += res.r.squaredNorm();
      if (!build) {
        continue;
      }
      const int oi = kf_off(static_cast<int>(i), D_);
      const int oj = kf_off(static_cast<int>(i) + 1, D_);
      ev->H.block<15, 15>(oi, oi) += res.J_i.transpose() * res.J_i;
      ev->H.block<15, 15>(oj, oj) += res.J_j.transpose() * res.J_j;
      ev->H.block<15, 15>(oi, oj) += res.J_i.transpose() * res.J_j;
      ev->H.block<15, 15>(oj, oi) += res.J_j.transpose() * res.J_i;
      ev->b.segment<15>(oi) -= res.J_i.transpose() * res.r;
      ev->b.segment<15>(oj) -= res.J_j.transpose() * res.r;
    }
  }

  void accumulate_prior(const Values& v, bool build, Evaluation* ev) const {
    const MargPrior& prior = *wp_.prior;
    const int m = static_cast<int>(prior.lin.size());
    const int dim = m * D_;
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Matrix3d> Jtheta(m);
    for (int k = 0; k < m; ++k) {
      const KeyframeState& lin = prior.lin[k];
      const KeyframeState& cur = v.states[k];
      const Eigen::Vector3d dtheta =
          quat_log(lin.pose.rotation.conjugate() * cur.pose.rotation);
      dx.segment<3>(k * D_) = dtheta;
      dx.segment<3>(k * D_ + 3) = cur.pose.translation - lin.pose.translation;
      if (uses_imu(wp_.mode)) {
        dx.segment<3>(k * D_ + 6) = cur.velocity - lin.velocity;
        dx.segment<3>(k * D_ + 9) = cur.bias.gyro - lin.bias.gyro;
        dx.segment<3>(k * D_ + 12) = cur.bias.accel - lin.bias.accel;
      }
      Jtheta[k] = right_jacobian_inv_so3(dx.segment<3>(k * D_));
    }
    const Eigen::VectorXd r = prior.sqrt_info * dx + prior.r0;
    ev->cost += r.squaredNorm();
    if (!build) {
      return;
    }
    // Chain rule: only the rotation components need the Log correction.
    Eigen::MatrixXd J = prior.sqrt_info;
    for (int k = 0; k < m; ++k) {
      J.middleCols(k * D_, 3) = prior.sqrt_info.middleCols(k * D_, 3) * Jtheta[k];
    }
    ev->H.topLeftCorner(dim, dim) += J.transpose() * J;
    ev->b.head(dim) -= J.transpose() * r;
  }

  const WindowProblem& wp_;
  const EstimatorConfig& cfg_;
  const int D_;
  std::vector<std::int64_t> active_ids_;
};

// Fixes the first pose by projecting its 6 tangent dims out of the system.
void apply_gauge(Eigen::MatrixXd* H, Eigen::VectorXd* b) {
  for (int i = 0; i < 6; ++i) {
    H->row(i).setZero();
    H->col(i).setZero();
    (*H)(i, i) = 1.0;
    (*b)(i) = 0.0;
  }
}

}  // namespace

SolveReport solve_window(WindowProblem& wp, const EstimatorConfig& config) {
  if (wp.states.empty()) {
    throw EmptyWindow("solve_window: no keyframe states");
  }
  if (!wp.prior.has_value() && !wp.fix_first_pose) {
    throw RankDeficient("solve_window: no gauge fixing mechanism active");
  }
  if (uses_imu(wp.mode) &&
      wp.imu_links.size() + 1 != wp.states.size()) {
    throw Error("solve_window: imu_links must bridge consecutive states");
  }

  Problem problem(wp, config);
  const int n = problem.kf_dims();
  const int n_lm = static_cast<int>(problem.active_ids().size());

  Values values = problem.current_values();
  Evaluation ev = problem.evaluate(values, true);

  SolveReport report;
  report.initial_cost = ev.cost;
  report.n_reprojection = ev.n_reprojection;
  report.n_depth = ev.n_depth;
  report.n_depth_gated = ev.n_depth_gated;
  report.n_behind_camera = ev.n_behind_camera;
  report.accepted_costs.push_back(ev.cost);

  if (!std::isfinite(ev.cost)) {
    throw SolverDiverged("solve_window: initial cost is not finite");
  }

  double lambda = kLambdaInit;
  double cost = ev.cost;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    report.iterations = iter + 1;

    bool accepted = false;
    double candidate_cost = std::numeric_limits<double>::quiet_NaN();
    Values candidate;
    double step_norm2 = 0.0;

    while (lambda <= kLambdaMax) {
      // Damped keyframe system.
      Eigen::MatrixXd Hd = ev.H;
      for (int i = 0; i < n; ++i) {
        Hd(i, i) += lambda * ev.H(i, i);
        if (Hd(i, i) < 1e-12) {
          Hd(i, i) = 1.0;  // unconstrained dim: force a zero step
        }
      }
      Eigen::VectorXd bd = ev.b;

      // Schur complement over damped landmark blocks.
      std::vector<Eigen::Matrix3d> Minv(n_lm);
      for (int i = 0; i < n_lm; ++i) {
        Eigen::Matrix3d Hll = ev.lm[i].Hll;
        for (int d = 0; d < 3; ++d) {
          Hll(d, d) += lambda * ev.lm[i].Hll(d, d) + 1e-12;
        }
        Minv[i] = Hll.inverse();
        for (const auto& [ka, Wa] : ev.lm[i].W) {
          const Eigen::Matrix<double, 6, 3> Ka = Wa * Minv[i];
          bd.segment<6>(kf_off(ka, problem.state_dim())) -= Ka * ev.lm[i].bl;
          for (const auto& [kb, Wb] : ev.lm[i].W) {
            Hd.block<6, 6>(kf_off(ka, problem.state_dim()),
                           kf_off(kb, problem.state_dim())) -=
                Ka * Wb.transpose();
          }
        }
      }

      if (!wp.prior.has_value() && wp.fix_first_pose) {
        apply_gauge(&Hd, &bd);
      }

      const Eigen::VectorXd dx_kf = Hd.ldlt().solve(bd);
      if (!dx_kf.allFinite()) {
        lambda *= 10.0;
        continue;
      }

      // Back-substitute landmark steps.
      std::vector<Eigen::Vector3d> dx_lm(n_lm);
      for (int i = 0; i < n_lm; ++i) {
        Eigen::Vector3d rhs = ev.lm[i].bl;
        for (const auto& [ka, Wa] : ev.lm[i].W) {
          rhs -= Wa.transpose() * dx_kf.segment<6>(
                     kf_off(ka, problem.state_dim()));
        }
        dx_lm[i] = Minv[i] * rhs;
      }

      candidate = problem.retract(values, dx_kf, dx_lm);
      candidate_cost = problem.evaluate(candidate, false).cost;
      step_norm2 = dx_kf.squaredNorm();
      for (const Eigen::Vector3d& d : dx_lm) {
        step_norm2 += d.squaredNorm();
      }

      if (std::isfinite(candidate_cost) && candidate_cost <= cost) {
        accepted = true;
        lambda = std::max(lambda / 3.0, kLambdaMin);
        break;
      }
      lambda *= 10.0;
    }

    if (!accepted) {
      if (!std::isfinite(candidate_cost)) {
        throw SolverDiverged(
            "solve_window: cost not finite at maximum damping");
      }
      // No downhill step exists at maximum damping: stationary point.
      report.converged = true;
      break;
    }

    const double prev = cost;
    values = std::move(candidate);
    cost = candidate_cost;
    report.accepted_costs.push_back(cost);

    const double rel = (prev - cost) / std::max(prev, 1e-300);
    if (rel < config.rel_decrease_tol ||
        std::sqrt(step_norm2) < config.step_tol) {
      report.converged = true;
      break;
    }
    ev = problem.evaluate(values, true);
  }

  // Write the accepted values back.
  wp.states = values.states;
  for (std::size_t i = 0; i < problem.active_ids().size(); ++i) {
    wp.landmarks.at(problem.active_ids()[i]).position = values.lm_pos[i];
  }
  report.final_cost = cost;
  return report;
}

namespace {

// Per-landmark normal-equation blocks over every keyframe that observes it,
// assembled when the landmark is consumed by the fold of the oldest frame.
struct FoldedLandmark {
  std::int64_t id = 0;
  Eigen::Matrix3d Hll = Eigen::Matrix3d::Zero();
  Eigen::Vector3d bl = Eigen::Vector3d::Zero();
  std::vector<int> kfs;  // observing keyframes, window slots
  std::vector<Eigen::Matrix<double, 6, 3>> W;
  std::vector<Eigen::Matrix<double, 6, 6>> Hpp;
  std::vector<Eigen::Matrix<double, 6, 1>> bp;

  int slot(int kf) {
    for (std::size_t i = 0; i < kfs.size(); ++i) {
      if (kfs[i] == kf) {
        return static_cast<int>(i);
      }
    }
    kfs.push_back(kf);
    W.emplace_back(Eigen::Matrix<double, 6, 3>::Zero());
    Hpp.emplace_back(Eigen::Matrix<double, 6, 6>::Zero());
    bp.emplace_back(Eigen::Matrix<double, 6, 1>::Zero());
    return static_cast<int>(kfs.size()) - 1;
  }
};

bool landmark_retained(const WindowLandmark& lm, Mode mode) {
  if (lm.obs.empty()) {
    return false;
  }
  if (mode == Mode::kMonoInertial) {
    return lm.obs.size() >= 2;
  }
  if (lm.obs.size() >= 2) {
    return true;
  }
  const TrackObservation& o = lm.obs.front();
  return o.px1.has_value() || o.depth.has_value();
}

}  // namespace

void marginalize_oldest(WindowProblem& wp, const EstimatorConfig& config) {
  const int n = static_cast<int>(wp.states.size());
  if (n < 2) {
    throw Error("marginalize_oldest: need at least two keyframes");
  }
  const int D = state_dim(wp.mode);
  const double delta = config.huber_pixels / config.pixel_sigma;
  const bool stereo = wp.mode != Mode::kMonoInertial;

  // Fold landmarks into the prior together with all of their current
  // observations: eliminating a landmark keeps its cross-frame constraints
  // instead of discarding them. Consumed landmarks are erased afterwards; a
  // still-alive track is re-seeded from future frames as a fresh unknown, so
  // no measurement is counted twice. With inertial links every landmark the
  // departing keyframe observes is consumed, because the links provide the
  // odometric backbone that a frozen linearization needs. Without them the
  // live long tracks are the only constraints the solver can relinearize,
  // so only tracks that already ended at the departing keyframe are folded.
  const bool consume_shared = uses_imu(wp.mode);
  std::vector<FoldedLandmark> folded;
  std::vector<std::int64_t> consumed;  // sorted: map iteration is ordered
  for (const auto& [id, lm] : wp.landmarks) {
    if (!lm.active || lm.obs.empty()) {
      continue;
    }
    bool seen_by_kf0 = false;
    bool only_kf0 = true;
    for (const TrackObservation& o : lm.obs) {
      if (o.kf == 0) {
        seen_by_kf0 = true;
      } else {
        only_kf0 = false;
      }
    }
    if (!seen_by_kf0 || (!consume_shared && !only_kf0)) {
      continue;
    }
    FoldedLandmark blocks;
    blocks.id = id;
    bool usable = true;
    for (const TrackObservation& o : lm.obs) {
      const KeyframeState& s = wp.states[o.kf];
      const int sl = blocks.slot(o.kf);
      auto add_pixel = [&](const ReprojectionResidual& res) {
        const HuberTerm h = huber(res.r.norm(), delta);
        const double w = h.sqrt_weight;
        Eigen::Matrix<double, 2, 6> Jp;
        Jp << res.J_theta, res.J_p;
        Jp *= w;
        const Eigen::Matrix<double, 2, 3> Jl = w * res.J_l;
        const Eigen::Vector2d r = w * res.r;
        blocks.Hpp[sl] += Jp.transpose() * Jp;
        blocks.bp[sl] -= Jp.transpose() * r;
        blocks.Hll += Jl.transpose() * Jl;
        blocks.bl -= Jl.transpose() * r;
        blocks.W[sl] += Jp.transpose() * Jl;
      };
      try {
        add_pixel(reprojection_residual(s.pose, wp.T_body_cam0, wp.K,
                                        lm.position, o.px0,
                                        config.pixel_sigma));
        if (stereo && o.px1.has_value()) {
          add_pixel(reprojection_residual(s.pose, wp.T_body_cam1, wp.K,
                                          lm.position, *o.px1,
                                          config.pixel_sigma));
        }
        if (stereo && o.depth.has_value()) {
          const std::optional<DepthResidual> rd = depth_residual(
              s.pose, wp.T_body_cam0, wp.K, lm.position, *o.depth, wp.baseline,
              DepthModel{config.depth_weight, config.depth_cutoff_factor,
                         config.pixel_sigma});
          if (rd.has_value()) {
            const HuberTerm h = huber(std::abs(rd->r), delta);
            const double w = h.sqrt_weight;
            Eigen::Matrix<double, 1, 6> Jp;
            Jp << rd->J_theta, rd->J_p;
            Jp *= w;
            const Eigen::RowVector3d Jl = w * rd->J_l;
            const double r = w * rd->r;
            blocks.Hpp[sl] += Jp.transpose() * Jp;
            blocks.bp[sl] -= Jp.transpose() * r;
            blocks.Hll += Jl.transpose() * Jl;
            blocks.bl -= Jl.transpose() * r;
            blocks.W[sl] += Jp.transpose() * Jl;
          }
        }
      } catch (const BehindCamera&) {
        usable = false;
        break;
      }
    }
    if (!usable) {
      continue;
    }
    // Only landmarks whose own block is invertible carry information
    // through the elimination; a single monocular ray does not.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(blocks.Hll);
    if (eig.eigenvalues()(0) <= 1e-8 * std::max(1.0, eig.eigenvalues()(2))) {
      continue;
    }
    consumed.push_back(id);
    folded.push_back(std::move(blocks));
  }

  // Layout: [kf0 | kept keyframes], D tangent dimensions each. Folded
  // landmarks are eliminated one by one first (their blocks are mutually
  // independent), leaving pose couplings between every pair of observers.
  const int m = D;
  const int total = D * n;
  auto kf_col = [&](int k) { return k * D; };

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(total);

  for (const FoldedLandmark& f : folded) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(f.Hll);
    const Eigen::Matrix3d Hll_inv =
        eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
        eig.eigenvectors().transpose();
    const Eigen::Vector3d hl = Hll_inv * f.bl;
    const int k = static_cast<int>(f.kfs.size());
    for (int a = 0; a < k; ++a) {
      const int ca = kf_col(f.kfs[a]);
      H.block<6, 6>(ca, ca) += f.Hpp[a];
      b.segment<6>(ca) += f.bp[a] - f.W[a] * hl;
      for (int c = 0; c < k; ++c) {
        H.block<6, 6>(ca, kf_col(f.kfs[c])) -=
            f.W[a] * Hll_inv * f.W[c].transpose();
      }
    }
  }

  if (uses_imu(wp.mode) && !wp.imu_links.empty()) {
    const InertialResidual res = inertial_residual(
        wp.states[0], wp.states[1], wp.imu_links[0], wp.gravity_world);
    const int c1 = kf_col(1);
    H.block<15, 15>(0, 0) += res.J_i.transpose() * res.J_i;
    H.block<15, 15>(c1, c1) += res.J_j.transpose() * res.J_j;
    H.block<15, 15>(0, c1) += res.J_i.transpose() * res.J_j;
    H.block<15, 15>(c1, 0) += res.J_j.transpose() * res.J_i;
    b.segment<15>(0) -= res.J_i.transpose() * res.r;
    b.segment<15>(c1) -= res.J_j.transpose() * res.r;
  }

  if (wp.prior.has_value()) {
    const MargPrior& prior = *wp.prior;
    const int pm = static_cast<int>(prior.lin.size());
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(pm * D);
    Eigen::MatrixXd J = prior.sqrt_info;
    for (int k = 0; k < pm; ++k) {
      const KeyframeState& lin = prior.lin[k];
      const KeyframeState& cur = wp.states[k];
      const Eigen::Vector3d dtheta =
          quat_log(lin.pose.rotation.conjugate() * cur.pose.rotation);
      dx.segment<3>(k * D) = dtheta;
      dx.segment<3>(k * D + 3) = cur.pose.translation - lin.pose.translation;
      if (uses_imu(wp.mode)) {
        dx.segment<3>(k * D + 6) = cur.velocity - lin.velocity;
        dx.segment<3>(k * D + 9) = cur.bias.gyro - lin.bias.gyro;
        dx.segment<3>(k * D + 12) = cur.bias.accel - lin.bias.accel;
      }
      J.middleCols(k * D, 3) =
          prior.sqrt_info.middleCols(k * D, 3) * right_jacobian_inv_so3(dtheta);
    }
    const Eigen::VectorXd r = prior.sqrt_info * dx + prior.r0;
    // Scatter J columns into the marginalization layout.
    for (int ka = 0; ka < pm; ++ka) {
      const int ca = kf_col(ka);
      b.segment(ca, D) -= J.middleCols(ka * D, D).transpose() * r;
      for (int kb = 0; kb < pm; ++kb) {
        H.block(ca, kf_col(kb), D, D) +=
            J.middleCols(ka * D, D).transpose() * J.middleCols(kb * D, D);
      }
    }
  }

  Eigen::MatrixXd H_kept;
  Eigen::VectorXd b_kept;
  if (wp.fix_first_pose) {
    // The solve held the gauge by freezing keyframe 0's pose, so the
    // marginalization must condition on that pose rather than treat it as
    // free: drop its six dimensions before the elimination. The surviving
    // prior then inherits the anchor through the inertial link instead of
    // carrying a global-translation/yaw null space.
    const int r = total - 6;
    const int mc = m - 6;
    const int k = total - m;
    Eigen::MatrixXd Hc(r, r);
    Eigen::VectorXd bc(r);
    Hc.topLeftCorner(mc, mc) = H.block(6, 6, mc, mc);
    Hc.topRightCorner(mc, k) = H.block(6, m, mc, k);
    Hc.bottomLeftCorner(k, mc) = H.block(m, 6, k, mc);
    Hc.bottomRightCorner(k, k) = H.bottomRightCorner(k, k);
    bc.head(mc) = b.segment(6, mc);
    bc.tail(k) = b.tail(k);
    schur_marginalize(Hc, bc, mc, &H_kept, &b_kept);
  } else {
    schur_marginalize(H, b, m, &H_kept, &b_kept);
  }
  const PriorFactor factor = factor_prior(H_kept, b_kept);

  if (factor.sqrt_info.rows() > 0) {
    MargPrior next;
    next.sqrt_info = factor.sqrt_info;
    next.r0 = factor.r0;
    next.lin.assign(wp.states.begin() + 1, wp.states.end());
    wp.prior = std::move(next);
    wp.fix_first_pose = false;
  } else {
    wp.prior.reset();
    wp.fix_first_pose = true;
  }

  // Drop the keyframe and re-index the surviving observations.
  wp.states.erase(wp.states.begin());
  if (!wp.imu_links.empty()) {
    wp.imu_links.erase(wp.imu_links.begin());
  }
  for (auto it = wp.landmarks.begin(); it != wp.landmarks.end();) {
    if (std::binary_search(consumed.begin(), consumed.end(), it->first)) {
      it = wp.landmarks.erase(it);
      continue;
    }
    WindowLandmark& lm = it->second;
    std::erase_if(lm.obs,
                  [](const TrackObservation& o) { return o.kf == 0; });
    for (TrackObservation& o : lm.obs) {
      --o.kf;
    }
    if (!landmark_retained(lm, wp.mode)) {
      it = wp.landmarks.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace railodo::est
