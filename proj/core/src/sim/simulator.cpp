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

#include "railodo/sim/simulator.hpp"

#include <cmath>

#include "railodo/error.hpp"
#include "railodo/so3.hpp"

namespace railodo::sim {

namespace {
// Points closer than this to the camera are not rendered.
constexpr double kMinRenderDepth = 0.5;
}  // namespace

double Rng::uniform() {
  // 53-bit mantissa uniform in [0, 1).
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::gaussian() {
  return gaussian2().x();
}

Eigen::Vector2d Rng::gaussian2() {
  // Box-Muller; u1 in (0, 1] so the log stays finite.
  const double u1 =
      (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  return Eigen::Vector2d(r * std::cos(a), r * std::sin(a));
}

Eigen::Vector3d Rng::gaussian3() {
  const Eigen::Vector2d xy = gaussian2();
  return Eigen::Vector3d(xy.x(), xy.y(), gaussian());
}

GroundTruth sample_trajectory(const RailPath& path, const SpeedProfile& profile,
                              double rate_hz) {
  if (profile.total_distance() > path.total_length() + 1e-9) {
    throw ProfileOverrunsPath("speed profile covers " +
                              std::to_string(profile.total_distance()) +
                              " m but the path has only " +
                              std::to_string(path.total_length()) + " m");
  }
  const double dt = 1.0 / rate_hz;
  const std::size_t n =
      static_cast<std::size_t>(std::floor(profile.duration() * rate_hz + 1e-9)) +
      1;
  GroundTruth gt(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double s = profile.distance(t);
    const double v = profile.speed(t);
    const double a = profile.accel(t);
    const RailPath::Sample ps = path.at(s);
    const double psi = ps.heading;
    const Eigen::Vector2d tangent(std::cos(psi), std::sin(psi));
    const Eigen::Vector2d normal_left(-std::sin(psi), std::cos(psi));

    GroundTruthSample& g = gt[k];
    g.t = t;
    g.arc_length = s;
    g.pose.translation = Eigen::Vector3d(ps.position.x(), ps.position.y(), 0.0);
    g.pose.rotation = quat_exp(Eigen::Vector3d(0.0, 0.0, psi));
    g.velocity_world = v * Eigen::Vector3d(tangent.x(), tangent.y(), 0.0);
    g.angular_rate_body = Eigen::Vector3d(0.0, 0.0, ps.curvature * v);
    const Eigen::Vector2d a2 = a * tangent + v * v * ps.curvature * normal_left;
    g.accel_world = Eigen::Vector3d(a2.x(), a2.y(), 0.0);
  }
  return gt;
}

ImuData generate_imu(const GroundTruth& gt, const ImuSpec& spec, double gravity,
                     Rng& rng) {
  ImuData out;
  out.samples.resize(gt.size());
  out.gyro_bias.resize(gt.size());
  out.accel_bias.resize(gt.size());

  const double rate = spec.rate_hz;
  const double sigma_g = spec.gyro_noise_density * std::sqrt(rate);
  const double sigma_a = spec.accel_noise_density * std::sqrt(rate);
  const double walk_g = spec.gyro_bias_walk / std::sqrt(rate);
  const double walk_a = spec.accel_bias_walk / std::sqrt(rate);
  const Eigen::Vector3d g_world(0.0, 0.0, -gravity);

  Eigen::Vector3d bg = spec.initial_gyro_bias;
  Eigen::Vector3d ba = spec.initial_accel_bias;
  for (std::size_t k = 0; k < gt.size(); ++k) {
    const GroundTruthSample& g = gt[k];
    const Eigen::Matrix3d R_bw = g.pose.rotation_matrix().transpose();
    const Eigen::Vector3d specific_force = R_bw * (g.accel_world - g_world);

    out.gyro_bias[k] = bg;
    out.accel_bias[k] = ba;
    out.samples[k].t = g.t;
    out.samples[k].gyro = g.angular_rate_body + bg + sigma_g * rng.gaussian3();
    out.samples[k].accel = specific_force + ba + sigma_a * rng.gaussian3();

    bg += walk_g * rng.gaussian3();
    ba += walk_a * rng.gaussian3();
  }
  return out;
}

LandmarkWorld generate_landmarks(const ScenarioConfig& sc, const RailPath& path,
                                 Rng& rng) {
  LandmarkWorld world;
  const double L = path.total_length();
  const LandmarkField& f = sc.landmarks;
  const std::int64_t n =
      static_cast<std::int64_t>(std::llround(f.density_per_m * L));
  world.all.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double s = rng.uniform(0.0, L);
    const double side = rng.uniform() < 0.5 ? 1.0 : -1.0;
    const double lateral = rng.uniform(f.lateral_min_m, f.lateral_max_m);
    const double height = rng.uniform(f.height_min_m, f.height_max_m);
    const RailPath::Sample ps = path.at(s);
    const Eigen::Vector2d normal_left(-std::sin(ps.heading),
                                      std::cos(ps.heading));
    const Eigen::Vector2d xy = ps.position + side * lateral * normal_left;
    world.all.push_back(Landmark{i, Eigen::Vector3d(xy.x(), xy.y(), height)});
  }
  if (sc.aliasing.enabled) {
    world.first_row_id = n;
    std::int64_t id = n;
    for (double s = 0.0; s <= L + 1e-9; s += sc.aliasing.spacing_m) {
      const RailPath::Sample ps = path.at(std::min(s, L));
      const Eigen::Vector2d normal_left(-std::sin(ps.heading),
                                        std::cos(ps.heading));
      const Eigen::Vector2d xy =
          ps.position + sc.aliasing.lateral_m * normal_left;
      world.all.push_back(
          Landmark{id++, Eigen::Vector3d(xy.x(), xy.y(), sc.aliasing.height_m)});
    }
  }
  return world;
}

Pose body_from_cam0() {
  Eigen::Matrix3d R;
  // Columns: camera x, y, z axes expressed in the body frame.
  R << 0.0, 0.0, 1.0,
      -1.0, 0.0, 0.0,
       0.0, -1.0, 0.0;
  return Pose(Eigen::Quaterniond(R), Eigen::Vector3d::Zero());
}

StereoRig true_stereo_rig(double baseline) {
  StereoRig rig;
  rig.T_cam0_cam1 =
      Pose(Eigen::Quaterniond::Identity(), Eigen::Vector3d(baseline, 0.0, 0.0));
  return rig;
}

StereoRig reported_stereo_rig(double baseline,
                              const CalibPerturbSpec& perturb) {
  StereoRig rig = true_stereo_rig(baseline);
  const double theta = perturb.rot_deg * M_PI / 180.0;
  rig.T_cam0_cam1.rotation = quat_exp(Eigen::Vector3d(0.0, theta, 0.0));
  rig.T_cam0_cam1.translation.x() += perturb.trans_m;
  return rig;
}

namespace {

struct RenderContext {
  const ScenarioConfig& sc;
  const StereoRig& true_rig;
  const StereoRig& reported_rig;
  const Pose& T_body_cam0;
};

void render_frame(const RenderContext& ctx, const GroundTruthSample& g,
                  int frame_id, const LandmarkWorld& world, Rng& rng,
                  std::vector<FrameObservation>* out) {
  const CameraIntrinsics& K = ctx.sc.intrinsics;
  const Pose T_w_c0 = compose(g.pose, ctx.T_body_cam0);
  const Pose T_c0_w = inverse(T_w_c0);
  const Pose T_c1_w = compose(inverse(ctx.true_rig.T_cam0_cam1), T_c0_w);

  std::vector<FrameObservation> frame_obs;
  for (const Landmark& lm : world.all) {
    const Eigen::Vector3d p_c0 = T_c0_w * lm.position;
    if (p_c0.z() < kMinRenderDepth || p_c0.z() > ctx.sc.max_range_m) {
      continue;
    }
    const PixelProjection proj0 = project(K, T_c0_w, lm.position);
    if (!proj0.in_image) {
      continue;
    }
    const Eigen::Vector2d px0 =
        proj0.pixel + ctx.sc.pixel_sigma * rng.gaussian2();
    if (px0.x() < 0.0 || px0.x() >= K.width || px0.y() < 0.0 ||
        px0.y() >= K.height) {
      continue;
    }

    FrameObservation obs;
    obs.frame_id = frame_id;
    obs.landmark_id = lm.id;
    obs.px0 = px0;

    // Stereo matching degrades with disparity, so matches only exist within
    // a range proportional to the baseline.
    const double stereo_range = ctx.sc.stereo_range_factor * ctx.sc.baseline_m;
    const Eigen::Vector3d p_c1 = T_c1_w * lm.position;
    if (p_c0.z() <= stereo_range && p_c1.z() >= kMinRenderDepth &&
        p_c1.z() <= ctx.sc.max_range_m) {
      const PixelProjection proj1 = project(K, T_c1_w, lm.position);
      if (proj1.in_image) {
        const Eigen::Vector2d px1 =
            proj1.pixel + ctx.sc.pixel_sigma * rng.gaussian2();
        if (px1.x() >= 0.0 && px1.x() < K.width && px1.y() >= 0.0 &&
            px1.y() < K.height) {
          obs.px1 = px1;
          // Measured depth the way a real pipeline would get it: from the
          // noisy match through the reported calibration.
          try {
            obs.depth =
                triangulate_stereo(ctx.reported_rig, K, K, px0, px1).depth;
          } catch (const DegenerateRay&) {
            // Bad match geometry; keep the pixel pair without a depth.
          }
        }
      }
    }
    frame_obs.push_back(std::move(obs));
  }

  // Data-association faults on the aliasing row: with the configured
  // probability an observation of row landmark k instead carries the
  // measurement of its pattern neighbor k+1 from the same frame, the way
  // a matcher locks onto the next, identical-looking instance. Payloads
  // are read from a pre-fault snapshot so substitutions do not chain;
  // each eligible observation is faulted independently, so the wrong-id
  // fraction equals mismatch_prob in expectation.
  if (ctx.sc.aliasing.enabled && ctx.sc.aliasing.mismatch_prob > 0.0 &&
      world.first_row_id >= 0) {
    const std::vector<FrameObservation> original(frame_obs);
    for (std::size_t i = 0; i + 1 < frame_obs.size(); ++i) {
      FrameObservation& a = frame_obs[i];
      const FrameObservation& b = original[i + 1];
      if (a.landmark_id >= world.first_row_id &&
          b.landmark_id == a.landmark_id + 1) {
        if (rng.uniform() < ctx.sc.aliasing.mismatch_prob) {
          a.px0 = b.px0;
          a.px1 = b.px1;
          a.depth = b.depth;
        }
      }
    }
  }

  out->insert(out->end(), frame_obs.begin(), frame_obs.end());
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& sc) {
  const RailPath path = build_path(sc.path);
  const SpeedProfile profile = build_profile(sc.profile);

  SimulationResult result;
  const GroundTruth gt_imu = sample_trajectory(path, profile, sc.imu.rate_hz);
  result.gt_frames = sample_trajectory(path, profile, sc.camera_rate_hz);
  result.true_rig = true_stereo_rig(sc.baseline_m);

  Rng rng(sc.seed);
  result.world = generate_landmarks(sc, path, rng);

  ImuData imu = generate_imu(gt_imu, sc.imu, sc.gravity, rng);
  result.true_gyro_bias = std::move(imu.gyro_bias);
  result.true_accel_bias = std::move(imu.accel_bias);

  SensorLog& log = result.log;
  log.intrinsics = sc.intrinsics;
  log.rig = reported_stereo_rig(sc.baseline_m, sc.perturb);
  log.T_body_cam0 = body_from_cam0();
  log.imu_spec = sc.imu;
  log.gravity = sc.gravity;
  log.camera_rate_hz = sc.camera_rate_hz;
  log.pixel_sigma = sc.pixel_sigma;
  log.imu = std::move(imu.samples);

  const RenderContext ctx{sc, result.true_rig, log.rig, log.T_body_cam0};
  int dropout_remaining = 0;
  for (std::size_t k = 0; k < result.gt_frames.size(); ++k) {
    const int frame_id = static_cast<int>(k);
    log.frames.push_back(CameraFrame{frame_id, result.gt_frames[k].t});
    if (dropout_remaining > 0) {
      --dropout_remaining;
      continue;
    }
    if (sc.dropout.start_prob > 0.0 && rng.uniform() < sc.dropout.start_prob) {
      dropout_remaining = sc.dropout.gap_frames - 1;
      continue;
    }
    render_frame(ctx, result.gt_frames[k], frame_id, result.world, rng,
                 &log.observations);
  }
  return result;
}

}  // namespace railodo::sim
