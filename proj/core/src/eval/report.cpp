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

#include "railodo/eval/report.hpp"

#include <algorithm>
#include <cstdio>

namespace railodo::eval {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  while (out.size() < width) {
    out += ' ';
  }
  return out;
}

}  // namespace

LengthReport make_length_report(double length,
                                const SegmentationResult& segmented) {
  LengthReport rep;
  rep.length = length;
  rep.n_segments = static_cast<int>(segmented.segments.size());
  rep.n_skipped = segmented.n_degenerate_skipped;
  if (!segmented.segments.empty()) {
    std::vector<double> dist;
    std::vector<double> head;
    dist.reserve(segmented.segments.size());
    head.reserve(segmented.segments.size());
    for (const SegmentError& e : segmented.segments) {
      dist.push_back(e.dist_pct);
      head.push_back(e.heading_deg_per_m);
    }
    rep.dist = aggregate(dist);
    rep.heading = aggregate(head);
  }
  return rep;
}

std::string format_cell(const LengthReport& rep, bool rmse) {
  if (rep.n_segments == 0) {
    return "n/a (" + std::to_string(rep.n_skipped) + " skipped)";
  }
  const double d = rmse ? rep.dist.rmse : rep.dist.median;
  const double h = rmse ? rep.heading.rmse : rep.heading.median;
  return fmt("%.3f", d) + " / " + fmt("%.4f", h);
}

std::string render_table(const std::vector<double>& lengths,
                         const std::vector<ReportRow>& rows) {
  const std::size_t n_cols = 1 + 2 * lengths.size();
  std::vector<std::vector<std::string>> cells;

  std::vector<std::string> header;
  header.push_back("mode / baseline");
  for (double L : lengths) {
    header.push_back(fmt("%.0f", L) + " m median");
    header.push_back(fmt("%.0f", L) + " m rmse");
  }
  cells.push_back(header);

  for (const ReportRow& row : rows) {
    std::vector<std::string> line;
    line.push_back(row.mode + " B=" + fmt("%.2f", row.baseline));
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (row.failed || i >= row.per_length.size()) {
        line.push_back("failed");
        line.push_back("failed");
      } else {
        line.push_back(format_cell(row.per_length[i], false));
        line.push_back(format_cell(row.per_length[i], true));
      }
    }
    cells.push_back(line);
  }

  std::vector<std::size_t> widths(n_cols, 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      widths[c] = std::max(widths[c], line[c].size());
    }
  }

  std::string out = "# segment errors: distance % of L / heading deg per m\n";
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c > 0) {
        line += "  ";
      }
      line += pad(cells[r][c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') {
      line.pop_back();
    }
    out += line + "\n";
    if (r == 0) {
      std::string rule;
      for (std::size_t c = 0; c < n_cols; ++c) {
        if (c > 0) {
          rule += "  ";
        }
        rule += std::string(widths[c], '-');
      }
      out += rule + "\n";
    }
  }
  return out;
}

std::string render_csv(const std::vector<SegmentRecord>& records) {
  std::string out = "run,mode,baseline,L,start_arclength,dist_pct,head_degpm\n";
  for (const SegmentRecord& r : records) {
    out += r.run + "," + r.mode + "," + fmt("%.2f", r.baseline) + "," +
           fmt("%.10g", r.length) + "," + fmt("%.6f", r.start_arclength) + "," +
           fmt("%.10g", r.dist_pct) + "," + fmt("%.10g", r.head_degpm) + "\n";
  }
  return out;
}

}  // namespace railodo::eval
