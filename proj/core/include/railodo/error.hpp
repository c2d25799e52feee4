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

#include <stdexcept>
#include <string>

namespace railodo {

// Base type for every error raised by the library. Each condition gets its
// own subclass so callers can react to (or test for) the precise failure.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ----- geometry ------------------------------------------------------------

// Point at or behind the camera plane (z <= 1e-6) during projection.
class BehindCamera : public Error {
 public:
  using Error::Error;
};

// Stereo rays (near) parallel or non-positive disparity; no triangulation.
class DegenerateRay : public Error {
 public:
  using Error::Error;
};

// Body x-axis within 1e-6 rad of vertical; heading undefined.
class GimbalDegenerate : public Error {
 public:
  using Error::Error;
};

// ----- simulation ----------------------------------------------------------

// Path elements whose tangents do not agree at a junction.
class DiscontinuousTangent : public Error {
 public:
  using Error::Error;
};

// Speed profile asks for more arc length than the path provides.
class ProfileOverrunsPath : public Error {
 public:
  using Error::Error;
};

// ----- estimation ----------------------------------------------------------

// Fewer than two IMU samples in an integration window.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

// Sample or frame timestamps not strictly increasing.
class NonMonotonicTimestamps : public Error {
 public:
  using Error::Error;
};

// Inertial residual between states that are not consecutive in time.
class NonAdjacentStates : public Error {
 public:
  using Error::Error;
};

// Optimizer could not produce a finite cost decrease at maximum damping.
class SolverDiverged : public Error {
 public:
  using Error::Error;
};

// Normal equations singular where they must not be (e.g. no gauge fixing).
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// ----- evaluation ----------------------------------------------------------

// No estimate/ground-truth pairs within the association tolerance.
class NoOverlap : public Error {
 public:
  using Error::Error;
};

// Paired trajectory shorter than one evaluation segment.
class TrajectoryTooShort : public Error {
 public:
  using Error::Error;
};

// Alignment window positions coincide; rigid fit undefined.
class DegenerateAlignment : public Error {
 public:
  using Error::Error;
};

// Statistics requested over an empty error set.
class EmptyErrorSet : public Error {
 public:
  using Error::Error;
};

// ----- input / output ------------------------------------------------------

// Malformed config file, missing key, or out-of-range value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed data file (trajectory, IMU, observation log).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure (missing file, unwritable directory).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace railodo
