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

#include "railodo/sim/scenario.hpp"

#include <set>
#include <sstream>

#include "railodo/error.hpp"

namespace railodo::sim {

namespace {

// Element grammar: whitespace-separated items, each "name:p1,p2,...".
std::vector<std::pair<std::string, std::vector<double>>> parse_elements(
    const std::string& text, const std::string& key) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("key '" + key + "': element '" + item +
                        "' missing ':' separator");
    }
    const std::string name = item.substr(0, colon);
    std::vector<double> params;
    std::istringstream ps(item.substr(colon + 1));
    std::string tok;
    while (std::getline(ps, tok, ',')) {
      try {
        std::size_t pos = 0;
        params.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) {
          throw std::invalid_argument("trailing characters");
        }
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse parameter '" + tok +
                          "' in element '" + item + "'");
      }
    }
    out.emplace_back(name, std::move(params));
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "': no elements");
  }
  return out;
}

PathSpec parse_path(const std::string& text) {
  PathSpec spec;
  for (const auto& [name, p] : parse_elements(text, "path.elements")) {
    PathElement e;
    if (name == "straight") {
      if (p.size() != 1) {
        throw ConfigError("path.elements: straight takes 1 parameter (length)");
      }
      e.kind = PathElement::Kind::kStraight;
      e.length = p[0];
    } else if (name == "arc") {
      if (p.size() != 2) {
        throw ConfigError(
            "path.elements: arc takes 2 parameters (radius, angle)");
      }
      e.kind = PathElement::Kind::kArc;
      e.radius = p[0];
      e.angle = p[1];
    } else {
      throw ConfigError("path.elements: unknown element '" + name + "'");
    }
    spec.elements.push_back(e);
  }
  return spec;
}

SpeedProfileSpec parse_profile(const std::string& text) {
  SpeedProfileSpec spec;
  for (const auto& [name, p] : parse_elements(text, "profile.elements")) {
    SpeedElement e;
    if (name == "hold") {
      if (p.size() != 2) {
        throw ConfigError(
            "profile.elements: hold takes 2 parameters (speed, duration)");
      }
      e.kind = SpeedElement::Kind::kHold;
      e.v0 = p[0];
      e.v1 = p[0];
      e.duration = p[1];
    } else if (name == "ramp") {
      if (p.size() != 3) {
        throw ConfigError(
            "profile.elements: ramp takes 3 parameters (v0, v1, duration)");
      }
      e.kind = SpeedElement::Kind::kRamp;
      e.v0 = p[0];
      e.v1 = p[1];
      e.duration = p[2];
    } else {
      throw ConfigError("profile.elements: unknown element '" + name + "'");
    }
    spec.elements.push_back(e);
  }
  return spec;
}

Eigen::Vector3d get_vec3(const KeyValueConfig& cfg, const std::string& key,
                         const Eigen::Vector3d& fallback) {
  if (!cfg.has(key)) {
    return fallback;
  }
  const std::vector<double> v = cfg.get_doubles(key);
  if (v.size() != 3) {
    throw ConfigError("key '" + key + "': expected 3 values");
  }
  return Eigen::Vector3d(v[0], v[1], v[2]);
}

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "path.elements",
      "profile.elements",
      "camera.rate_hz",
      "camera.fx",
      "camera.fy",
      "camera.cx",
      "camera.cy",
      "camera.width",
      "camera.height",
      "camera.baseline_m",
      "camera.pixel_sigma",
      "camera.max_range_m",
      "camera.stereo_range_factor",
      "imu.rate_hz",
      "imu.gyro_noise_density",
      "imu.accel_noise_density",
      "imu.gyro_bias_walk",
      "imu.accel_bias_walk",
      "imu.initial_gyro_bias",
      "imu.initial_accel_bias",
      "gravity",
      "landmarks.density_per_m",
      "landmarks.lateral_min_m",
      "landmarks.lateral_max_m",
      "landmarks.height_min_m",
      "landmarks.height_max_m",
      "aliasing.enabled",
      "aliasing.spacing_m",
      "aliasing.lateral_m",
      "aliasing.height_m",
      "aliasing.mismatch_prob",
      "dropout.start_prob",
      "dropout.gap_frames",
      "perturb.rot_deg",
      "perturb.trans_m",
  };
  return keys;
}

}  // namespace

ScenarioConfig load_scenario(const KeyValueConfig& cfg) {
  cfg.require_known_keys(allowed_keys());

  ScenarioConfig sc;
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  sc.path = parse_path(cfg.get_string("path.elements"));
  sc.profile = parse_profile(cfg.get_string("profile.elements"));

  sc.camera_rate_hz = cfg.get_double_or("camera.rate_hz", 20.0);
  sc.intrinsics.fx = cfg.get_double_or("camera.fx", 979.5);
  sc.intrinsics.fy = cfg.get_double_or("camera.fy", 979.5);
  sc.intrinsics.width = static_cast<int>(cfg.get_int_or("camera.width", 1920));
  sc.intrinsics.height = static_cast<int>(cfg.get_int_or("camera.height", 1200));
  sc.intrinsics.cx =
      cfg.get_double_or("camera.cx", 0.5 * sc.intrinsics.width);
  sc.intrinsics.cy =
      cfg.get_double_or("camera.cy", 0.5 * sc.intrinsics.height);
  sc.baseline_m = cfg.get_double_or("camera.baseline_m", 0.31);
  sc.pixel_sigma = cfg.get_double_or("camera.pixel_sigma", 1.0);
  sc.max_range_m = cfg.get_double_or("camera.max_range_m", 80.0);
  sc.stereo_range_factor =
      cfg.get_double_or("camera.stereo_range_factor", 60.0);

  sc.imu.rate_hz = cfg.get_double_or("imu.rate_hz", 300.0);
  sc.imu.gyro_noise_density = cfg.get_double_or("imu.gyro_noise_density", 2e-4);
  sc.imu.accel_noise_density =
      cfg.get_double_or("imu.accel_noise_density", 2e-3);
  sc.imu.gyro_bias_walk = cfg.get_double_or("imu.gyro_bias_walk", 4e-6);
  sc.imu.accel_bias_walk = cfg.get_double_or("imu.accel_bias_walk", 4e-5);
  sc.imu.initial_gyro_bias =
      get_vec3(cfg, "imu.initial_gyro_bias", Eigen::Vector3d::Zero());
  sc.imu.initial_accel_bias =
      get_vec3(cfg, "imu.initial_accel_bias", Eigen::Vector3d::Zero());
  sc.gravity = cfg.get_double_or("gravity", 9.81);

  sc.landmarks.density_per_m = cfg.get_double_or("landmarks.density_per_m", 0.5);
  sc.landmarks.lateral_min_m = cfg.get_double_or("landmarks.lateral_min_m", 2.0);
  sc.landmarks.lateral_max_m =
      cfg.get_double_or("landmarks.lateral_max_m", 20.0);
  sc.landmarks.height_min_m = cfg.get_double_or("landmarks.height_min_m", -1.0);
  sc.landmarks.height_max_m = cfg.get_double_or("landmarks.height_max_m", 8.0);

  sc.aliasing.enabled = cfg.get_bool_or("aliasing.enabled", false);
  sc.aliasing.spacing_m = cfg.get_double_or("aliasing.spacing_m", 2.0);
  sc.aliasing.lateral_m = cfg.get_double_or("aliasing.lateral_m", 0.0);
  sc.aliasing.height_m = cfg.get_double_or("aliasing.height_m", -2.5);
  sc.aliasing.mismatch_prob = cfg.get_double_or("aliasing.mismatch_prob", 0.0);

  sc.dropout.start_prob = cfg.get_double_or("dropout.start_prob", 0.0);
  sc.dropout.gap_frames =
      static_cast<int>(cfg.get_int_or("dropout.gap_frames", 5));

  sc.perturb.rot_deg = cfg.get_double_or("perturb.rot_deg", 0.0);
  sc.perturb.trans_m = cfg.get_double_or("perturb.trans_m", 0.0);

  if (sc.camera_rate_hz <= 0.0 || sc.imu.rate_hz <= 0.0) {
    throw ConfigError("sensor rates must be positive");
  }
  if (sc.baseline_m <= 0.0) {
    throw ConfigError("camera.baseline_m must be positive");
  }
  if (sc.pixel_sigma < 0.0) {
    throw ConfigError("camera.pixel_sigma must be nonnegative");
  }
  if (sc.stereo_range_factor <= 0.0) {
    throw ConfigError("camera.stereo_range_factor must be positive");
  }
  if (sc.aliasing.mismatch_prob < 0.0 || sc.aliasing.mismatch_prob > 1.0 ||
      sc.dropout.start_prob < 0.0 || sc.dropout.start_prob > 1.0) {
    throw ConfigError("probabilities must be in [0, 1]");
  }
  return sc;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  return load_scenario(KeyValueConfig::parse_file(path));
}

}  // namespace railodo::sim
