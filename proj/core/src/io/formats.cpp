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

#include "railodo/io/formats.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "railodo/config.hpp"
#include "railodo/error.hpp"

namespace railodo::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out.imbue(std::locale::classic());
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  return in;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Strips '#' comments; returns the fields of each non-blank line along with
// its 1-based line number.
std::vector<std::pair<int, std::vector<std::string>>> read_rows(
    const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (ss >> field) {
      fields.push_back(field);
    }
    if (!fields.empty()) {
      rows.emplace_back(lineno, std::move(fields));
    }
  }
  return rows;
}

double parse_double(const std::string& path, int lineno, const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": not a number: '" + s + "'");
  }
  if (used != s.size()) {
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": trailing characters in number: '" + s + "'");
  }
  return v;
}

long long parse_int(const std::string& path, int lineno, const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": not an integer: '" + s + "'");
  }
  if (used != s.size()) {
    throw ParseError(path + ":" + std::to_string(lineno) +
                     ": trailing characters in integer: '" + s + "'");
  }
  return v;
}

void require_fields(const std::string& path, int lineno, std::size_t got,
                    std::size_t want, const char* what) {
  if (got != want) {
    throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(want) + " fields for " + what + ", got " +
                     std::to_string(got));
  }
}

std::string pose_line(double t, const Pose& pose) {
  const Eigen::Vector3d& p = pose.translation;
  const Eigen::Quaterniond& q = pose.rotation;
  std::string out = fmt("%.9f", t);
  for (double v : {p.x(), p.y(), p.z(), q.x(), q.y(), q.z(), q.w()}) {
    out += " " + fmt("%.9f", v);
  }
  return out;
}

}  // namespace

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (const TrajectorySample& s : traj) {
    out << pose_line(s.t, s.pose) << "\n";
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

Trajectory read_trajectory(const std::string& path) {
  Trajectory traj;
  for (const auto& [lineno, f] : read_rows(path)) {
    require_fields(path, lineno, f.size(), 8, "trajectory sample");
    TrajectorySample s;
    s.t = parse_double(path, lineno, f[0]);
    Eigen::Vector3d p(parse_double(path, lineno, f[1]),
                      parse_double(path, lineno, f[2]),
                      parse_double(path, lineno, f[3]));
    Eigen::Quaterniond q(parse_double(path, lineno, f[7]),
                         parse_double(path, lineno, f[4]),
                         parse_double(path, lineno, f[5]),
                         parse_double(path, lineno, f[6]));
    if (q.norm() < 1e-9) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": zero quaternion");
    }
    s.pose = Pose(q, p);
    traj.push_back(s);
  }
  check_monotonic(traj);
  return traj;
}

void write_imu(const std::string& path,
               const std::vector<sim::ImuSample>& samples) {
  std::ofstream out = open_out(path);
  out << "# timestamp gx gy gz ax ay az\n";
  for (const sim::ImuSample& s : samples) {
    out << fmt("%.9f", s.t);
    for (double v : {s.gyro.x(), s.gyro.y(), s.gyro.z(), s.accel.x(),
                     s.accel.y(), s.accel.z()}) {
      out << " " << fmt("%.9f", v);
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::vector<sim::ImuSample> read_imu(const std::string& path) {
  std::vector<sim::ImuSample> samples;
  for (const auto& [lineno, f] : read_rows(path)) {
    require_fields(path, lineno, f.size(), 7, "imu sample");
    sim::ImuSample s;
    s.t = parse_double(path, lineno, f[0]);
    s.gyro = Eigen::Vector3d(parse_double(path, lineno, f[1]),
                             parse_double(path, lineno, f[2]),
                             parse_double(path, lineno, f[3]));
    s.accel = Eigen::Vector3d(parse_double(path, lineno, f[4]),
                              parse_double(path, lineno, f[5]),
                              parse_double(path, lineno, f[6]));
    if (!samples.empty() && s.t <= samples.back().t) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": non-increasing timestamp");
    }
    samples.push_back(s);
  }
  return samples;
}

namespace {

void write_sensor_meta(const std::string& path, const sim::SensorLog& log) {
  std::ofstream out = open_out(path);
  const CameraIntrinsics& K = log.intrinsics;
  out << "# sensor rig metadata\n";
  out << "camera.fx=" << fmt("%.9f", K.fx) << "\n";
  out << "camera.fy=" << fmt("%.9f", K.fy) << "\n";
  out << "camera.cx=" << fmt("%.9f", K.cx) << "\n";
  out << "camera.cy=" << fmt("%.9f", K.cy) << "\n";
  out << "camera.width=" << K.width << "\n";
  out << "camera.height=" << K.height << "\n";
  out << "camera.rate_hz=" << fmt("%.9f", log.camera_rate_hz) << "\n";
  out << "camera.pixel_sigma=" << fmt("%.9f", log.pixel_sigma) << "\n";
  const Eigen::Vector3d& rt = log.rig.T_cam0_cam1.translation;
  const Eigen::Quaterniond& rq = log.rig.T_cam0_cam1.rotation;
  out << "rig.translation=" << fmt("%.12f", rt.x()) << " "
      << fmt("%.12f", rt.y()) << " " << fmt("%.12f", rt.z()) << "\n";
  out << "rig.quaternion=" << fmt("%.12f", rq.x()) << " " << fmt("%.12f", rq.y())
      << " " << fmt("%.12f", rq.z()) << " " << fmt("%.12f", rq.w()) << "\n";
  const Eigen::Vector3d& bt = log.T_body_cam0.translation;
  const Eigen::Quaterniond& bq = log.T_body_cam0.rotation;
  out << "body_cam0.translation=" << fmt("%.12f", bt.x()) << " "
      << fmt("%.12f", bt.y()) << " " << fmt("%.12f", bt.z()) << "\n";
  out << "body_cam0.quaternion=" << fmt("%.12f", bq.x()) << " "
      << fmt("%.12f", bq.y()) << " " << fmt("%.12f", bq.z()) << " "
      << fmt("%.12f", bq.w()) << "\n";
  out << "imu.rate_hz=" << fmt("%.9f", log.imu_spec.rate_hz) << "\n";
  out << "imu.gyro_noise_density=" << fmt("%.12g", log.imu_spec.gyro_noise_density)
      << "\n";
  out << "imu.accel_noise_density="
      << fmt("%.12g", log.imu_spec.accel_noise_density) << "\n";
  out << "imu.gyro_bias_walk=" << fmt("%.12g", log.imu_spec.gyro_bias_walk)
      << "\n";
  out << "imu.accel_bias_walk=" << fmt("%.12g", log.imu_spec.accel_bias_walk)
      << "\n";
  out << "gravity=" << fmt("%.9f", log.gravity) << "\n";
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

Pose pose_from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  const std::vector<double> t = cfg.get_doubles(prefix + ".translation");
  const std::vector<double> q = cfg.get_doubles(prefix + ".quaternion");
  if (t.size() != 3 || q.size() != 4) {
    throw ParseError("sensor metadata: bad " + prefix + " transform");
  }
  return Pose(Eigen::Quaterniond(q[3], q[0], q[1], q[2]),
              Eigen::Vector3d(t[0], t[1], t[2]));
}

void read_sensor_meta(const std::string& path, sim::SensorLog* log) {
  const KeyValueConfig cfg = KeyValueConfig::parse_file(path);
  log->intrinsics.fx = cfg.get_double("camera.fx");
  log->intrinsics.fy = cfg.get_double("camera.fy");
  log->intrinsics.cx = cfg.get_double("camera.cx");
  log->intrinsics.cy = cfg.get_double("camera.cy");
  log->intrinsics.width = cfg.get_int("camera.width");
  log->intrinsics.height = cfg.get_int("camera.height");
  log->camera_rate_hz = cfg.get_double("camera.rate_hz");
  log->pixel_sigma = cfg.get_double("camera.pixel_sigma");
  log->rig.T_cam0_cam1 = pose_from_config(cfg, "rig");
  log->T_body_cam0 = pose_from_config(cfg, "body_cam0");
  log->imu_spec.rate_hz = cfg.get_double("imu.rate_hz");
  log->imu_spec.gyro_noise_density = cfg.get_double("imu.gyro_noise_density");
  log->imu_spec.accel_noise_density = cfg.get_double("imu.accel_noise_density");
  log->imu_spec.gyro_bias_walk = cfg.get_double("imu.gyro_bias_walk");
  log->imu_spec.accel_bias_walk = cfg.get_double("imu.accel_bias_walk");
  log->gravity = cfg.get_double("gravity");
}

}  // namespace

void write_sensor_log(const std::string& dir, const sim::SensorLog& log) {
  write_sensor_meta(dir + "/sensor.txt", log);
  write_imu(dir + "/imu.txt", log.imu);

  std::ofstream frames = open_out(dir + "/frames.txt");
  frames << "# frame_id timestamp\n";
  for (const sim::CameraFrame& f : log.frames) {
    frames << f.id << " " << fmt("%.9f", f.t) << "\n";
  }
  if (!frames) {
    throw IoError("write failed: " + dir + "/frames.txt");
  }

  std::ofstream obs = open_out(dir + "/observations.txt");
  obs << "# frame_ts frame_id cam_id landmark_id u v [depth]\n";
  for (const sim::FrameObservation& o : log.observations) {
    const double t = log.frames.at(static_cast<std::size_t>(o.frame_id)).t;
    obs << fmt("%.9f", t) << " " << o.frame_id << " 0 " << o.landmark_id << " "
        << fmt("%.4f", o.px0.x()) << " " << fmt("%.4f", o.px0.y());
    if (o.depth) {
      obs << " " << fmt("%.6f", *o.depth);
    }
    obs << "\n";
    if (o.px1) {
      obs << fmt("%.9f", t) << " " << o.frame_id << " 1 " << o.landmark_id
          << " " << fmt("%.4f", o.px1->x()) << " " << fmt("%.4f", o.px1->y())
          << "\n";
    }
  }
  if (!obs) {
    throw IoError("write failed: " + dir + "/observations.txt");
  }
}

sim::SensorLog read_sensor_log(const std::string& dir) {
  sim::SensorLog log;
  read_sensor_meta(dir + "/sensor.txt", &log);
  log.imu = read_imu(dir + "/imu.txt");

  const std::string frames_path = dir + "/frames.txt";
  for (const auto& [lineno, f] : read_rows(frames_path)) {
    require_fields(frames_path, lineno, f.size(), 2, "frame");
    sim::CameraFrame frame;
    frame.id = static_cast<int>(parse_int(frames_path, lineno, f[0]));
    frame.t = parse_double(frames_path, lineno, f[1]);
    if (frame.id != static_cast<int>(log.frames.size())) {
      throw ParseError(frames_path + ":" + std::to_string(lineno) +
                       ": frame ids must be dense from 0");
    }
    if (!log.frames.empty() && frame.t <= log.frames.back().t) {
      throw ParseError(frames_path + ":" + std::to_string(lineno) +
                       ": non-increasing timestamp");
    }
    log.frames.push_back(frame);
  }

  const std::string obs_path = dir + "/observations.txt";
  std::map<std::pair<int, std::int64_t>, sim::FrameObservation> grouped;
  std::map<std::pair<int, std::int64_t>, bool> has_cam0;
  for (const auto& [lineno, f] : read_rows(obs_path)) {
    if (f.size() != 6 && f.size() != 7) {
      throw ParseError(obs_path + ":" + std::to_string(lineno) +
                       ": expected 6 or 7 fields for observation, got " +
                       std::to_string(f.size()));
    }
    const int frame_id = static_cast<int>(parse_int(obs_path, lineno, f[1]));
    const long long cam_id = parse_int(obs_path, lineno, f[2]);
    const std::int64_t lm_id = parse_int(obs_path, lineno, f[3]);
    const Eigen::Vector2d px(parse_double(obs_path, lineno, f[4]),
                             parse_double(obs_path, lineno, f[5]));
    if (frame_id < 0 || frame_id >= static_cast<int>(log.frames.size())) {
      throw ParseError(obs_path + ":" + std::to_string(lineno) +
                       ": unknown frame id " + std::to_string(frame_id));
    }
    if (cam_id != 0 && cam_id != 1) {
      throw ParseError(obs_path + ":" + std::to_string(lineno) +
                       ": cam_id must be 0 or 1");
    }
    const std::pair<int, std::int64_t> key(frame_id, lm_id);
    auto [it, inserted] = grouped.try_emplace(key);
    if (inserted) {
      it->second.frame_id = frame_id;
      it->second.landmark_id = lm_id;
    }
    if (cam_id == 0) {
      it->second.px0 = px;
      has_cam0[key] = true;
      if (f.size() == 7) {
        it->second.depth = parse_double(obs_path, lineno, f[6]);
      }
    } else {
      if (f.size() == 7) {
        throw ParseError(obs_path + ":" + std::to_string(lineno) +
                         ": depth belongs on the cam-0 row");
      }
      it->second.px1 = px;
    }
  }
  log.observations.reserve(grouped.size());
  for (const auto& [key, o] : grouped) {
    if (!has_cam0[key]) {
      throw ParseError(obs_path + ": landmark " + std::to_string(key.second) +
                       " in frame " + std::to_string(key.first) +
                       " has no cam-0 row");
    }
    log.observations.push_back(o);
  }
  return log;
}

void write_diagnostics(const std::string& path,
                       const std::vector<est::FrameDiagnostic>& diags) {
  std::ofstream out = open_out(path);
  out << "# frame_id t n_obs iterations converged final_cost n_depth"
         " n_depth_gated n_behind_camera coasted\n";
  for (const est::FrameDiagnostic& d : diags) {
    out << d.frame_id << " " << fmt("%.9f", d.t) << " " << d.n_obs << " "
        << d.iterations << " " << (d.converged ? 1 : 0) << " "
        << fmt("%.9g", d.final_cost) << " " << d.n_depth << " "
        << d.n_depth_gated << " " << d.n_behind_camera << " "
        << (d.coasted ? 1 : 0) << "\n";
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::vector<est::FrameDiagnostic> read_diagnostics(const std::string& path) {
  std::vector<est::FrameDiagnostic> diags;
  for (const auto& [lineno, f] : read_rows(path)) {
    require_fields(path, lineno, f.size(), 10, "frame diagnostic");
    est::FrameDiagnostic d;
    d.frame_id = static_cast<int>(parse_int(path, lineno, f[0]));
    d.t = parse_double(path, lineno, f[1]);
    d.n_obs = static_cast<int>(parse_int(path, lineno, f[2]));
    d.iterations = static_cast<int>(parse_int(path, lineno, f[3]));
    d.converged = parse_int(path, lineno, f[4]) != 0;
    d.final_cost = parse_double(path, lineno, f[5]);
    d.n_depth = static_cast<int>(parse_int(path, lineno, f[6]));
    d.n_depth_gated = static_cast<int>(parse_int(path, lineno, f[7]));
    d.n_behind_camera = static_cast<int>(parse_int(path, lineno, f[8]));
    d.coasted = parse_int(path, lineno, f[9]) != 0;
    diags.push_back(d);
  }
  return diags;
}

Trajectory to_trajectory(const sim::GroundTruth& gt) {
  Trajectory traj;
  traj.reserve(gt.size());
  for (const sim::GroundTruthSample& s : gt) {
    traj.push_back({s.t, s.pose});
  }
  return traj;
}

}  // namespace railodo::io
