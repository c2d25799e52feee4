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

#include "railodo/eval/evaluation.hpp"

namespace railodo::eval {

// Aggregates for one (row, segment length) table cell.
struct LengthReport {
  double length = 0.0;
  int n_segments = 0;  // scored segments
  int n_skipped = 0;   // degenerate alignment / heading, dropped
  ErrorStats dist;     // percent of segment length
  ErrorStats heading;  // deg per meter
};

// One table row: a (mode, baseline) combination across segment lengths.
struct ReportRow {
  std::string mode;
  double baseline = 0.0;
  bool failed = false;  // run did not produce an estimate
  std::vector<LengthReport> per_length;  // parallel to the lengths list
};

// One scored segment, tagged with its run for the plot CSV.
struct SegmentRecord {
  std::string run;
  std::string mode;
  double baseline = 0.0;
  double length = 0.0;
  double start_arclength = 0.0;
  double dist_pct = 0.0;
  double head_degpm = 0.0;
};

LengthReport make_length_report(double length,
                                const SegmentationResult& segmented);

// "median_dist / median_heading" with 3 and 4 decimals; "n/a (k skipped)"
// when no segment survived. `rmse` selects the RMSE pair instead.
std::string format_cell(const LengthReport& rep, bool rmse);

// Aligned text table, one row per (mode, baseline), a median and an RMSE
// column per segment length. Byte-deterministic for equal inputs.
std::string render_table(const std::vector<double>& lengths,
                         const std::vector<ReportRow>& rows);

// CSV with header run,mode,baseline,L,start_arclength,dist_pct,head_degpm.
std::string render_csv(const std::vector<SegmentRecord>& records);

}  // namespace railodo::eval
