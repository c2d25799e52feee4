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

#include "railodo/est/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo::est {

Mode parse_mode(const std::string& name) {
  if (name == "mono-inertial") return Mode::kMonoInertial;
  if (name == "stereo") return Mode::kStereo;
  if (name == "stereo-inertial") return Mode::kStereoInertial;
  throw ConfigError("unknown estimator mode '" + name +
                    "' (expected mono-inertial, stereo, or stereo-inertial)");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kMonoInertial:
      return "mono-inertial";
    case Mode::kStereo:
      return "stereo";
    case Mode::kStereoInertial:
      return "stereo-inertial";
  }
  return "unknown";
}

EstimatorConfig load_estimator_config(const KeyValueConfig& cfg) {
  static const std::set<std::string> allowed = {
      "estimator.mode",          "estimator.window_size",
      "estimator.max_iterations", "estimator.huber_pixels",
      "estimator.depth_weight",  "estimator.depth_cutoff_factor",
      "estimator.pixel_sigma",   "estimator.mask",
      "estimator.batch",
  };
  cfg.require_known_keys(allowed);

  EstimatorConfig out;
  if (cfg.has("estimator.mode")) {
    out.mode = parse_mode(cfg.get_string("estimator.mode"));
  }
  out.window_size =
      static_cast<int>(cfg.get_int_or("estimator.window_size", 10));
  out.max_iterations =
      static_cast<int>(cfg.get_int_or("estimator.max_iterations", 15));
  out.huber_pixels = cfg.get_double_or("estimator.huber_pixels", 2.0);
  out.depth_weight = cfg.get_double_or("estimator.depth_weight", 1.0);
  out.depth_cutoff_factor =
      cfg.get_double_or("estimator.depth_cutoff_factor", 40.0);
  out.pixel_sigma = cfg.get_double_or("estimator.pixel_sigma", 1.0);
  out.batch = cfg.get_bool_or("estimator.batch", false);
  if (cfg.has("estimator.mask")) {
    const std::vector<double> v = cfg.get_doubles("estimator.mask");
    if (v.size() != 4) {
      throw ConfigError("estimator.mask: expected 4 values (u0 v0 u1 v1)");
    }
    out.mask = PixelRect{v[0], v[1], v[2], v[3]};
  }
  if (out.window_size < 2) {
    throw ConfigError("estimator.window_size must be at least 2");
  }
  if (out.max_iterations < 1) {
    throw ConfigError("estimator.max_iterations must be at least 1");
  }
  if (out.pixel_sigma <= 0.0) {
    throw ConfigError("estimator.pixel_sigma must be positive");
  }
  return out;
}

namespace {

// Two-view midpoint triangulation in world coordinates. Returns false on
// insufficient parallax or a point behind either camera.
bool triangulate_two_view(const Pose& T_w_c_a, const Pose& T_w_c_b,
                          const CameraIntrinsics& K,
                          const Eigen::Vector2d& px_a,
                          const Eigen::Vector2d& px_b, Eigen::Vector3d* out) {
  const Eigen::Vector3d da =
      (T_w_c_a.rotation *
       Eigen::Vector3d((px_a.x() - K.cx) / K.fx, (px_a.y() - K.cy) / K.fy, 1.0))
          .normalized();
  const Eigen::Vector3d db =
      (T_w_c_b.rotation *
       Eigen::Vector3d((px_b.x() - K.cx) / K.fx, (px_b.y() - K.cy) / K.fy, 1.0))
          .normalized();
  // Parallax gate: nearly parallel rays give wild depths.
  if (da.cross(db).norm() < 1e-3) {
    return false;
  }
  const Eigen::Vector3d oa = T_w_c_a.translation;
  const Eigen::Vector3d ob = T_w_c_b.translation;
  Eigen::Matrix<double, 3, 2> A;
  A.col(0) = da;
  A.col(1) = -db;
  const Eigen::Vector2d st =
      (A.transpose() * A).ldlt().solve(A.transpose() * (ob - oa));
  if (!(st.x() > 0.5) || !(st.y() > 0.5)) {
    return false;
  }
  *out = 0.5 * (oa + st.x() * da + ob + st.y() * db);
  return out->allFinite();
}

struct FrameObsRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class EstimatorRunner {
 public:
  EstimatorRunner(const sim::SensorLog& log, const EstimatorConfig& config,
                  const InitialStateHint& hint)
      : log_(log), cfg_(config), hint_(hint) {
    if (log.frames.empty()) {
      throw EmptyWindow("run_estimator: sensor log has no camera frames");
    }
    for (std::size_t i = 1; i < log.frames.size(); ++i) {
      if (!(log.frames[i].t > log.frames[i - 1].t)) {
        throw NonMonotonicTimestamps("run_estimator: frame timestamps");
      }
    }
    for (std::size_t i = 1; i < log.imu.size(); ++i) {
      if (!(log.imu[i].t > log.imu[i - 1].t)) {
        throw NonMonotonicTimestamps("run_estimator: IMU timestamps");
      }
    }

    wp_.mode = cfg_.mode;
    wp_.K = log.intrinsics;
    wp_.T_body_cam0 = log.T_body_cam0;
    wp_.T_body_cam1 = compose(log.T_body_cam0, log.rig.T_cam0_cam1);
    wp_.baseline = log.rig.baseline();
    wp_.gravity_world = Eigen::Vector3d(0.0, 0.0, -log.gravity);
    // Floors keep the preintegration covariance invertible when the log
    // reports an ideal (noiseless) IMU.
    wp_.imu_noise.gyro_noise_density =
        std::max(log.imu_spec.gyro_noise_density, 1e-7);
    wp_.imu_noise.accel_noise_density =
        std::max(log.imu_spec.accel_noise_density, 1e-6);
    wp_.imu_noise.gyro_bias_walk = std::max(log.imu_spec.gyro_bias_walk, 1e-9);
    wp_.imu_noise.accel_bias_walk =
        std::max(log.imu_spec.accel_bias_walk, 1e-8);

    index_frames();
  }

  EstimationResult run() {
    EstimationResult result;
    result.trajectory.reserve(log_.frames.size());
    result.frames.reserve(log_.frames.size());

    for (std::size_t f = 0; f < log_.frames.size(); ++f) {
      const sim::CameraFrame& frame = log_.frames[f];
      FrameDiagnostic diag;
      diag.frame_id = frame.id;
      diag.t = frame.t;

      append_keyframe(frame);
      diag.n_obs = ingest_observations(f);
      diag.coasted = diag.n_obs < kMinObservations;
      initialize_landmarks();

      if (!cfg_.batch) {
        SolveReport report;
        try {
          report = solve_window(wp_, cfg_);
        } catch (const SolverDiverged& e) {
          throw SolverDiverged(std::string(e.what()) + " at frame " +
                               std::to_string(frame.id));
        }
        diag.iterations = report.iterations;
        diag.converged = report.converged;
        diag.final_cost = report.final_cost;
        diag.n_depth = report.n_depth;
        diag.n_depth_gated = report.n_depth_gated;
        diag.n_behind_camera = report.n_behind_camera;
        result.trajectory.push_back({frame.t, wp_.states.back().pose});
        if (static_cast<int>(wp_.states.size()) >=
            std::max(2, cfg_.window_size)) {
          marginalize_oldest(wp_, cfg_);
        }
      }
      result.frames.push_back(diag);
    }

    if (cfg_.batch) {
      const SolveReport report = solve_window(wp_, cfg_);
      for (std::size_t f = 0; f < log_.frames.size(); ++f) {
        result.trajectory.push_back(
            {log_.frames[f].t, wp_.states[f].pose});
        result.frames[f].iterations = report.iterations;
        result.frames[f].converged = report.converged;
        result.frames[f].final_cost = report.final_cost;
      }
    }
    return result;
  }

 private:
  void index_frames() {
    ranges_.resize(log_.frames.size());
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < log_.frames.size(); ++f) {
      const int id = log_.frames[f].id;
      while (cursor < log_.observations.size() &&
             log_.observations[cursor].frame_id < id) {
        ++cursor;
      }
      ranges_[f].begin = cursor;
      while (cursor < log_.observations.size() &&
             log_.observations[cursor].frame_id == id) {
        ++cursor;
      }
      ranges_[f].end = cursor;
    }
  }

  void append_keyframe(const sim::CameraFrame& frame) {
    KeyframeState state;
    state.t = frame.t;
    if (wp_.states.empty()) {
      state.pose = Pose::identity();
      if (hint_.has_velocity) {
        state.velocity = hint_.velocity_body;  // world frame == body frame here
      }
      wp_.states.push_back(state);
      return;
    }

    const KeyframeState& prev = wp_.states.back();
    if (uses_imu(cfg_.mode)) {
      imu::PreintegratedImu pre =
          integrate(imu_span(prev.t, frame.t), wp_.imu_noise, prev.bias);
      const imu::NavState predicted = imu::predict_state(
          {prev.pose, prev.velocity}, prev.bias, pre, wp_.gravity_world);
      state.pose = predicted.pose;
      state.velocity = predicted.velocity;
      state.bias = prev.bias;
      wp_.imu_links.push_back(std::move(pre));
    } else {
      // Constant-velocity guess from the last two keyframes.
      if (wp_.states.size() >= 2) {
        const Pose& a = wp_.states[wp_.states.size() - 2].pose;
        const Pose& b = prev.pose;
        state.pose = compose(b, compose(inverse(a), b));
      } else {
        state.pose = prev.pose;
      }
    }
    wp_.states.push_back(state);
  }

  std::span<const sim::ImuSample> imu_span(double t0, double t1) const {
    const auto lower = std::lower_bound(
        log_.imu.begin(), log_.imu.end(), t0 - 1e-6,
        [](const sim::ImuSample& s, double t) { return s.t < t; });
    const auto upper = std::upper_bound(
        log_.imu.begin(), log_.imu.end(), t1 + 1e-6,
        [](double t, const sim::ImuSample& s) { return t < s.t; });
    if (lower >= upper) {
      throw EmptyWindow("run_estimator: no IMU samples in frame interval");
    }
    return {&*lower, static_cast<std::size_t>(upper - lower)};
  }

  int ingest_observations(std::size_t f) {
    const int kf = static_cast<int>(wp_.states.size()) - 1;
    int n = 0;
    for (std::size_t i = ranges_[f].begin; i < ranges_[f].end; ++i) {
      const sim::FrameObservation& raw = log_.observations[i];
      if (cfg_.mask.has_value() && cfg_.mask->contains(raw.px0)) {
        continue;
      }
      TrackObservation obs;
      obs.kf = kf;
      obs.px0 = raw.px0;
      if (cfg_.mode != Mode::kMonoInertial) {
        if (raw.px1.has_value() &&
            !(cfg_.mask.has_value() && cfg_.mask->contains(*raw.px1))) {
          obs.px1 = raw.px1;
          obs.depth = raw.depth;
        }
      }
      wp_.landmarks[raw.landmark_id].obs.push_back(std::move(obs));
      touched_.push_back(raw.landmark_id);
      ++n;
    }
    return n;
  }

  void initialize_landmarks() {
    for (std::int64_t id : touched_) {
      WindowLandmark& lm = wp_.landmarks.at(id);
      if (lm.active) {
        continue;
      }
      if (cfg_.mode != Mode::kMonoInertial) {
        // A single stereo-constrained observation suffices.
        const TrackObservation& o = lm.obs.back();
        const Pose T_w_c0 =
            compose(wp_.states[o.kf].pose, wp_.T_body_cam0);
        if (o.depth.has_value()) {
          lm.position = T_w_c0 * unproject(wp_.K, o.px0, *o.depth);
          lm.active = true;
          continue;
        }
        if (o.px1.has_value()) {
          try {
            StereoRig rig;
            rig.T_cam0_cam1 = compose(inverse(wp_.T_body_cam0), wp_.T_body_cam1);
            const StereoPoint p =
                triangulate_stereo(rig, wp_.K, wp_.K, o.px0, *o.px1);
            lm.position = T_w_c0 * p.point_cam0;
            lm.active = true;
            continue;
          } catch (const DegenerateRay&) {
            // fall through to multi-view
          }
        }
      }
      if (lm.obs.size() >= 2) {
        const TrackObservation& a = lm.obs.front();
        const TrackObservation& b = lm.obs.back();
        const Pose T_w_ca = compose(wp_.states[a.kf].pose, wp_.T_body_cam0);
        const Pose T_w_cb = compose(wp_.states[b.kf].pose, wp_.T_body_cam0);
        Eigen::Vector3d p;
        if (triangulate_two_view(T_w_ca, T_w_cb, wp_.K, a.px0, b.px0, &p)) {
          lm.position = p;
          lm.active = true;
        }
      }
    }
    touched_.clear();
  }

  const sim::SensorLog& log_;
  const EstimatorConfig& cfg_;
  const InitialStateHint hint_;
  WindowProblem wp_;
  std::vector<FrameObsRange> ranges_;
  std::vector<std::int64_t> touched_;
};

}  // namespace

EstimationResult run_estimator(const sim::SensorLog& log,
                               const EstimatorConfig& config,
                               const InitialStateHint& hint) {
  EstimatorRunner runner(log, config, hint);
  return runner.run();
}

}  // namespace railodo::est
