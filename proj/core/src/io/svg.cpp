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

#include "railodo/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "railodo/error.hpp"

namespace railodo::io {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_paths_svg(const std::string& path,
                     const std::vector<SvgPath>& paths) {
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  bool any = false;
  for (const SvgPath& p : paths) {
    for (const Eigen::Vector2d& pt : p.points) {
      if (!any) {
        min_x = max_x = pt.x();
        min_y = max_y = pt.y();
        any = true;
      }
      min_x = std::min(min_x, pt.x());
      max_x = std::max(max_x, pt.x());
      min_y = std::min(min_y, pt.y());
      max_y = std::max(max_y, pt.y());
    }
  }
  if (!any) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double margin = 0.05 * span;
  min_x -= margin;
  min_y -= margin;
  const double width = (max_x + margin) - min_x;
  const double height = (max_y + margin) - min_y;
  const double pixels = 800.0;
  const double scale = pixels / std::max(width, height);
  const double h_px = height * scale;

  // World y is up in the plot; SVG y grows downward.
  const auto X = [&](double x) { return (x - min_x) * scale; };
  const auto Y = [&](double y) { return h_px - (y - min_y) * scale; };

  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << fmt(width * scale) << "\" height=\"" << fmt(h_px)
      << "\" viewBox=\"0 0 " << fmt(width * scale) << " " << fmt(h_px)
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double grid = 100.0;
  for (double gx = std::ceil(min_x / grid) * grid; gx < min_x + width;
       gx += grid) {
    out << "<line x1=\"" << fmt(X(gx)) << "\" y1=\"0\" x2=\"" << fmt(X(gx))
        << "\" y2=\"" << fmt(h_px)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
  }
  for (double gy = std::ceil(min_y / grid) * grid; gy < min_y + height;
       gy += grid) {
    out << "<line x1=\"0\" y1=\"" << fmt(Y(gy)) << "\" x2=\""
        << fmt(width * scale) << "\" y2=\"" << fmt(Y(gy))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
  }

  for (std::size_t i = 0; i < paths.size(); ++i) {
    const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const Eigen::Vector2d& pt : paths[i].points) {
      out << fmt(X(pt.x())) << "," << fmt(Y(pt.y())) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"12\" y=\"" << fmt(20.0 + 18.0 * static_cast<double>(i))
        << "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"" << color
        << "\">" << paths[i].label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

SvgPath svg_path_from_trajectory(const std::string& label,
                                 const Trajectory& traj) {
  SvgPath p;
  p.label = label;
  p.points.reserve(traj.size());
  for (const TrajectorySample& s : traj) {
    p.points.emplace_back(s.pose.translation.x(), s.pose.translation.y());
  }
  return p;
}

}  // namespace railodo::io
