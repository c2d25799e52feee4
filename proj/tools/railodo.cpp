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

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "railodo/config.hpp"
#include "railodo/error.hpp"
#include "railodo/est/estimator.hpp"
#include "railodo/eval/evaluation.hpp"
#include "railodo/eval/report.hpp"
#include "railodo/io/formats.hpp"
#include "railodo/io/svg.hpp"
#include "railodo/sim/scenario.hpp"
#include "railodo/sim/simulator.hpp"

namespace fs = std::filesystem;
using namespace railodo;

namespace {

// 0 ok, 2 input error, 3 solver/run error, 4 evaluation error.
int classify(const railodo::Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IoError*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const NoOverlap*>(&e) ||
      dynamic_cast<const TrajectoryTooShort*>(&e) ||
      dynamic_cast<const EmptyErrorSet*>(&e) ||
      dynamic_cast<const DegenerateAlignment*>(&e) ||
      dynamic_cast<const GimbalDegenerate*>(&e)) {
    return 4;
  }
  return 3;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string token;
  while (ss >> token) {
    out.push_back(token);
  }
  return out;
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir + ": " + ec.message());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << text;
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

std::vector<double> parse_lengths(const std::string& csv) {
  std::string spaced = csv;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::vector<double> out;
  for (const std::string& tok : split_ws(spaced)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("segment length is not a number: '" + tok + "'");
    }
    if (out.back() <= 0.0) {
      throw ConfigError("segment lengths must be positive");
    }
  }
  if (out.empty()) {
    throw ConfigError("segment length list is empty");
  }
  return out;
}

// Estimator config from an optional file plus CLI overrides. The pixel
// sigma defaults to the log's value when the file does not pin one; a
// noiseless log falls back to 1 px so whitening stays finite.
est::EstimatorConfig make_estimator_config(const std::string& config_path,
                                           const std::string& mode_override,
                                           const std::string& mask_override,
                                           const sim::SensorLog& log) {
  KeyValueConfig cfg =
      config_path.empty()
          ? KeyValueConfig::parse_string("", "<defaults>")
          : KeyValueConfig::parse_file(config_path);
  if (!mode_override.empty()) {
    cfg.set("estimator.mode", mode_override);
  }
  if (!mask_override.empty()) {
    std::string spaced = mask_override;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    cfg.set("estimator.mask", spaced);
  }
  const bool sigma_pinned = cfg.has("estimator.pixel_sigma");
  est::EstimatorConfig ec = est::load_estimator_config(cfg);
  if (!sigma_pinned) {
    ec.pixel_sigma = log.pixel_sigma > 1e-9 ? log.pixel_sigma : 1.0;
  }
  return ec;
}

est::InitialStateHint hint_from_ground_truth(const std::string& logdir) {
  est::InitialStateHint hint;
  const std::string gt_path = logdir + "/groundtruth.txt";
  if (!fs::exists(gt_path)) {
    return hint;
  }
  const Trajectory gt = io::read_trajectory(gt_path);
  if (gt.size() < 2) {
    return hint;
  }
  const Eigen::Vector3d v_world =
      (gt[1].pose.translation - gt[0].pose.translation) / (gt[1].t - gt[0].t);
  hint.has_velocity = true;
  hint.velocity_body = gt[0].pose.rotation.conjugate() * v_world;
  return hint;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::int64_t> seed;
  std::optional<double> baseline;
};

int cmd_simulate(const SimulateArgs& args) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(args.config);
  if (args.seed) {
    cfg.set("seed", std::to_string(*args.seed));
  }
  if (args.baseline) {
    cfg.set("camera.baseline_m", fmt("%.17g", *args.baseline));
  }
  const sim::ScenarioConfig sc = sim::load_scenario(cfg);
  const sim::SimulationResult res = sim::simulate(sc);

  make_dir(args.out);
  io::write_sensor_log(args.out, res.log);
  io::write_trajectory(args.out + "/groundtruth.txt",
                       io::to_trajectory(res.gt_frames));
  std::cout << "simulate: " << res.log.frames.size() << " frames, "
            << res.log.imu.size() << " imu samples, "
            << res.log.observations.size() << " observations -> " << args.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string logdir;
  std::string out;
  std::string config;
  std::string mode;
  std::string mask;
};

int cmd_estimate(const EstimateArgs& args) {
  const sim::SensorLog log = io::read_sensor_log(args.logdir);
  const est::EstimatorConfig ec =
      make_estimator_config(args.config, args.mode, args.mask, log);
  const est::InitialStateHint hint = hint_from_ground_truth(args.logdir);
  const est::EstimationResult res = est::run_estimator(log, ec, hint);

  io::write_trajectory(args.out, res.trajectory);
  io::write_diagnostics(args.out + ".diag", res.frames);
  int coasted = 0;
  for (const est::FrameDiagnostic& d : res.frames) {
    coasted += d.coasted ? 1 : 0;
  }
  std::cout << "estimate: " << mode_name(ec.mode) << ", "
            << res.trajectory.size() << " poses, " << coasted
            << " coasted frames -> " << args.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string est;
  std::string gt;
  std::string out;
  std::string lengths = "10,50";
};

int cmd_evaluate(const EvaluateArgs& args) {
  const Trajectory est_traj = io::read_trajectory(args.est);
  const Trajectory gt_traj = io::read_trajectory(args.gt);
  const std::vector<double> lengths = parse_lengths(args.lengths);

  const eval::Association assoc = eval::associate(est_traj, gt_traj);

  eval::ReportRow row;
  row.mode = "estimate";
  row.baseline = 0.0;
  std::vector<eval::SegmentRecord> records;
  for (double L : lengths) {
    const eval::SegmentationResult seg = eval::segment_errors(assoc, L);
    row.per_length.push_back(eval::make_length_report(L, seg));
    for (const eval::SegmentError& e : seg.segments) {
      records.push_back({"run0", row.mode, row.baseline, L, e.start_arclength,
                         e.dist_pct, e.heading_deg_per_m});
    }
  }

  const std::string table = eval::render_table(lengths, {row});
  make_dir(args.out);
  write_text(args.out + "/report.txt", table);
  write_text(args.out + "/segments.csv", eval::render_csv(records));
  std::cout << table;
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string manifest;
  std::string out;
};

struct SweepRun {
  // One (seed, baseline) pair: a simulation shared by all modes.
  std::int64_t seed = 0;
  double baseline = 0.0;
  std::string sim_dir;
  // Per mode: estimate file, success flag, per-L segments.
  struct ModeResult {
    bool ok = false;
    std::string error;
    std::vector<std::vector<eval::SegmentError>> per_length;
  };
  std::vector<ModeResult> modes;
  bool sim_ok = false;
  std::string sim_error;
};

std::string resolve_against(const std::string& base_file,
                            const std::string& maybe_relative) {
  const fs::path p(maybe_relative);
  if (p.is_absolute()) {
    return maybe_relative;
  }
  return (fs::path(base_file).parent_path() / p).string();
}

int cmd_sweep(const SweepArgs& args) {
  KeyValueConfig manifest = KeyValueConfig::parse_file(args.manifest);
  manifest.require_known_keys({"scenario", "estimator", "seeds", "modes",
                               "baselines", "segment_lengths"});
  const std::string scenario_path =
      resolve_against(args.manifest, manifest.get_string("scenario"));
  const std::string estimator_path =
      manifest.has("estimator")
          ? resolve_against(args.manifest, manifest.get_string("estimator"))
          : "";

  std::vector<std::int64_t> seeds;
  for (double s : manifest.get_doubles("seeds")) {
    seeds.push_back(static_cast<std::int64_t>(s));
  }
  const std::vector<std::string> modes = split_ws(manifest.get_string("modes"));
  std::vector<double> baselines = manifest.get_doubles("baselines");
  std::vector<double> lengths{10.0, 50.0};
  if (manifest.has("segment_lengths")) {
    lengths = manifest.get_doubles("segment_lengths");
  }
  if (seeds.empty() || modes.empty() || baselines.empty() || lengths.empty()) {
    throw ConfigError("sweep manifest: seeds, modes, baselines and "
                      "segment_lengths must be non-empty");
  }
  for (const std::string& m : modes) {
    est::parse_mode(m);  // validate up front
  }
  // Validate the scenario once before spending time on the grid.
  KeyValueConfig scenario_cfg = KeyValueConfig::parse_file(scenario_path);
  sim::load_scenario(scenario_cfg);

  make_dir(args.out);
  make_dir(args.out + "/runs");

  std::vector<SweepRun> runs;
  for (std::int64_t seed : seeds) {
    for (double b : baselines) {
      SweepRun run;
      run.seed = seed;
      run.baseline = b;
      run.sim_dir = args.out + "/runs/s" + std::to_string(seed) + "_b" +
                    fmt("%.2f", b);
      run.modes.resize(modes.size());
      runs.push_back(run);
    }
  }

  const auto execute_run = [&](SweepRun& run) {
    try {
      KeyValueConfig cfg = KeyValueConfig::parse_file(scenario_path);
      cfg.set("seed", std::to_string(run.seed));
      cfg.set("camera.baseline_m", fmt("%.17g", run.baseline));
      const sim::ScenarioConfig sc = sim::load_scenario(cfg);
      const sim::SimulationResult res = sim::simulate(sc);
      make_dir(run.sim_dir);
      io::write_sensor_log(run.sim_dir, res.log);
      io::write_trajectory(run.sim_dir + "/groundtruth.txt",
                           io::to_trajectory(res.gt_frames));
      run.sim_ok = true;
    } catch (const std::exception& e) {
      run.sim_error = e.what();
      return;
    }

    const sim::SensorLog log = io::read_sensor_log(run.sim_dir);
    const Trajectory gt_traj =
        io::read_trajectory(run.sim_dir + "/groundtruth.txt");
    const est::InitialStateHint hint = hint_from_ground_truth(run.sim_dir);

    for (std::size_t m = 0; m < modes.size(); ++m) {
      SweepRun::ModeResult& mr = run.modes[m];
      try {
        const est::EstimatorConfig ec =
            make_estimator_config(estimator_path, modes[m], "", log);
        const est::EstimationResult res = est::run_estimator(log, ec, hint);
        const std::string est_path = run.sim_dir + "_" + modes[m] + ".txt";
        io::write_trajectory(est_path, res.trajectory);
        io::write_diagnostics(est_path + ".diag", res.frames);

        const eval::Association assoc =
            eval::associate(res.trajectory, gt_traj);
        for (double L : lengths) {
          mr.per_length.push_back(eval::segment_errors(assoc, L).segments);
        }
        mr.ok = true;
      } catch (const std::exception& e) {
        mr.error = e.what();
        mr.per_length.clear();
      }
    }
  };

  // RAILODO_THREADS caps concurrency; each worker owns whole runs, the
  // merge below is single-threaded and order-deterministic.
  unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RAILODO_THREADS")) {
    try {
      n_threads = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw ConfigError("RAILODO_THREADS is not a number");
    }
  }
  n_threads = std::min<unsigned>(n_threads, runs.size());

  if (n_threads <= 1) {
    for (SweepRun& run : runs) {
      execute_run(run);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_threads; ++w) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= runs.size()) {
            return;
          }
          execute_run(runs[i]);
        }
      });
    }
    for (std::thread& t : workers) {
      t.join();
    }
  }

  // Merge: rows ordered (mode, baseline); segments pooled across seeds.
  std::vector<eval::ReportRow> rows;
  std::vector<eval::SegmentRecord> records;
  int n_success = 0;
  for (const std::string& mode : modes) {
    const std::size_t m =
        static_cast<std::size_t>(&mode - modes.data());
    for (double b : baselines) {
      eval::ReportRow row;
      row.mode = mode;
      row.baseline = b;
      bool any_ok = false;
      for (std::size_t li = 0; li < lengths.size(); ++li) {
        eval::SegmentationResult pooled;
        for (const SweepRun& run : runs) {
          if (run.baseline != b || !run.sim_ok || !run.modes[m].ok) {
            continue;
          }
          any_ok = true;
          for (const eval::SegmentError& e : run.modes[m].per_length[li]) {
            pooled.segments.push_back(e);
            records.push_back({"seed" + std::to_string(run.seed), mode, b,
                               lengths[li], e.start_arclength, e.dist_pct,
                               e.heading_deg_per_m});
          }
        }
        row.per_length.push_back(
            eval::make_length_report(lengths[li], pooled));
      }
      row.failed = !any_ok;
      if (any_ok) {
        ++n_success;
      }
      rows.push_back(row);
    }
  }

  const std::string table = eval::render_table(lengths, rows);
  write_text(args.out + "/report.txt", table);
  write_text(args.out + "/segments.csv", eval::render_csv(records));

  // Qualitative plot: ground truth and every mode for the first grid cell.
  if (!runs.empty() && runs.front().sim_ok) {
    const SweepRun& first = runs.front();
    std::vector<io::SvgPath> paths;
    paths.push_back(io::svg_path_from_trajectory(
        "ground truth",
        io::read_trajectory(first.sim_dir + "/groundtruth.txt")));
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (!first.modes[m].ok) {
        continue;
      }
      paths.push_back(io::svg_path_from_trajectory(
          modes[m],
          io::read_trajectory(first.sim_dir + "_" + modes[m] + ".txt")));
    }
    io::write_paths_svg(args.out + "/paths.svg", paths);
  }

  std::cout << table;
  for (const SweepRun& run : runs) {
    if (!run.sim_ok) {
      std::cerr << "sweep: simulation failed for seed "
                << run.seed << " B=" << fmt("%.2f", run.baseline) << ": "
                << run.sim_error << "\n";
      continue;
    }
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (!run.modes[m].ok) {
        std::cerr << "sweep: " << modes[m] << " failed for seed " << run.seed
                  << " B=" << fmt("%.2f", run.baseline) << ": "
                  << run.modes[m].error << "\n";
      }
    }
  }
  return n_success > 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rail odometry workbench"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "generate a synthetic sensor log");
  sim_cmd->add_option("--config", sim_args.config, "scenario config file")
      ->required();
  sim_cmd->add_option("--out", sim_args.out, "output directory")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "override scenario seed");
  sim_cmd->add_option("--baseline", sim_args.baseline,
                      "override stereo baseline [m]");

  EstimateArgs est_args;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "run the sliding-window estimator");
  est_cmd->add_option("logdir", est_args.logdir, "sensor log directory")
      ->required();
  est_cmd->add_option("--out", est_args.out, "output trajectory file")
      ->required();
  est_cmd->add_option("--config", est_args.config, "estimator config file");
  est_cmd->add_option("--mode", est_args.mode,
                      "mono-inertial, stereo, or stereo-inertial");
  est_cmd->add_option("--mask", est_args.mask,
                      "ignore observations in pixel rect u0,v0,u1,v1");

  EvaluateArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "segment-based trajectory evaluation");
  eval_cmd->add_option("estimate", eval_args.est, "estimated trajectory file")
      ->required();
  eval_cmd->add_option("groundtruth", eval_args.gt, "ground-truth file")
      ->required();
  eval_cmd->add_option("--out", eval_args.out, "output directory")->required();
  eval_cmd->add_option("--segment-lengths", eval_args.lengths,
                       "comma-separated segment lengths [m]");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a seeds x modes x baselines grid");
  sweep_cmd->add_option("--config", sweep_args.manifest, "sweep manifest file")
      ->required();
  sweep_cmd->add_option("--out", sweep_args.out, "output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_args);
    }
    if (est_cmd->parsed()) {
      return cmd_estimate(est_args);
    }
    if (eval_cmd->parsed()) {
      return cmd_evaluate(eval_args);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_args);
    }
  } catch (const railodo::Error& e) {
    std::cerr << "railodo: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "railodo: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
