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

#include <string>
#include <vector>

#include "railodo/est/estimator.hpp"
#include "railodo/sim/simulator.hpp"
#include "railodo/trajectory.hpp"

namespace railodo::io {

// Plain-text trajectory, one sample per line:
//   timestamp tx ty tz qx qy qz qw
// Quaternion scalar-last, '#' starts a comment, blank lines ignored.
void write_trajectory(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);

// IMU file, one sample per line: timestamp gx gy gz ax ay az
// (rad/s and m/s^2, body frame).
void write_imu(const std::string& path, const std::vector<sim::ImuSample>& samples);
std::vector<sim::ImuSample> read_imu(const std::string& path);

// Sensor log directory layout:
//   sensor.txt        key=value metadata (rig, intrinsics, rates, noise)
//   imu.txt           IMU samples
//   frames.txt        frame_id timestamp
//   observations.txt  frame_ts frame_id cam_id landmark_id u v [depth]
// A stereo observation occupies two rows (cam 0 and cam 1); the measured
// depth appears only on the cam-0 row. Ground truth lives beside these in
// groundtruth.txt (trajectory format) but is not part of the SensorLog.
void write_sensor_log(const std::string& dir, const sim::SensorLog& log);
sim::SensorLog read_sensor_log(const std::string& dir);

// Per-frame estimator diagnostics, one row per frame.
void write_diagnostics(const std::string& path,
                       const std::vector<est::FrameDiagnostic>& diags);
std::vector<est::FrameDiagnostic> read_diagnostics(const std::string& path);

// Trajectory view of ground-truth samples (timestamps and poses only).
Trajectory to_trajectory(const sim::GroundTruth& gt);

}  // namespace railodo::io
