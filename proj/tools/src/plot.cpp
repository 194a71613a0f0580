// Copyright 2026 The quadvo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quadvo_tools/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace quadvo::tools {

namespace {

constexpr double kWidth = 800, kHeight = 600, kMargin = 60, kLegend = 160;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string trajectory_svg(const std::vector<std::vector<geometry::PoseMatrix>>& trajectories,
                           const std::vector<std::string>& labels) {
  if (trajectories.empty()) throw std::invalid_argument("plot: no trajectories");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, z0 = x0, z1 = -x0;
  for (const auto& t : trajectories) {
    for (const geometry::PoseMatrix& p : t) {
      x0 = std::min(x0, p.translation.x());
      x1 = std::max(x1, p.translation.x());
      z0 = std::min(z0, p.translation.z());
      z1 = std::max(z1, p.translation.z());
    }
  }
  if (!std::isfinite(x0)) x0 = x1 = z0 = z1 = 0.0;
  // Equal scale on both axes, at least 1 m of extent.
  double span = std::max({x1 - x0, z1 - z0, 1.0});
  const double cx = 0.5 * (x0 + x1), cz = 0.5 * (z0 + z1);
  span *= 1.05;
  const double plot_w = kWidth - 2 * kMargin - kLegend, plot_h = kHeight - 2 * kMargin;
  const double scale = std::min(plot_w, plot_h) / span;
  const double lo_x = cx - 0.5 * plot_w / scale, lo_z = cz - 0.5 * plot_h / scale;
  auto px = [&](double x) { return kMargin + (x - lo_x) * scale; };
  auto py = [&](double z) { return kHeight - kMargin - (z - lo_z) * scale; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
       "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
       num(kHeight) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" fill=\"white\"/>\n";
  s += "<rect x=\"" + num(kMargin) + "\" y=\"" + num(kMargin) + "\" width=\"" +
       num(plot_w) + "\" height=\"" + num(plot_h) +
       "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const double step = nice_step(span);
  const double hi_x = lo_x + plot_w / scale, hi_z = lo_z + plot_h / scale;
  for (double t = std::ceil(lo_x / step) * step; t <= hi_x + 1e-9; t += step) {
    const double x = px(t);
    s += "<line class=\"tick\" x1=\"" + num(x) + "\" y1=\"" + num(kHeight - kMargin) +
         "\" x2=\"" + num(x) + "\" y2=\"" + num(kHeight - kMargin + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(kHeight - kMargin + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  }
  for (double t = std::ceil(lo_z / step) * step; t <= hi_z + 1e-9; t += step) {
    const double y = py(t);
    s += "<line class=\"tick\" x1=\"" + num(kMargin - 5) + "\" y1=\"" + num(y) +
         "\" x2=\"" + num(kMargin) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kMargin - 8) + "\" y=\"" + num(y + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + num(t) + "</text>\n";
  }
  s += "<text x=\"" + num(kMargin + plot_w / 2) + "\" y=\"" + num(kHeight - 15) +
       "\" font-size=\"13\" text-anchor=\"middle\">x [m]</text>\n";
  s += "<text x=\"15\" y=\"" + num(kMargin + plot_h / 2) +
       "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
       num(kMargin + plot_h / 2) + ")\">z [m]</text>\n";

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    s += "<polyline class=\"trajectory\" fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < trajectories[i].size(); ++k) {
      const auto& t = trajectories[i][k].translation;
      if (k > 0) s += ' ';
      s += num(px(t.x())) + "," + num(py(t.z()));
    }
    s += "\"/>\n";
    const std::string label = i < labels.size() ? labels[i] : "trajectory " + std::to_string(i + 1);
    const double ly = kMargin + 10 + 20 * static_cast<double>(i);
    const double lx = kWidth - kMargin - kLegend + 20;
    s += "<g class=\"legend\"><line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" +
         num(lx + 25) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/><text x=\"" + num(lx + 32) + "\" y=\"" + num(ly + 4) +
         "\" font-size=\"12\">" + escape(label) + "</text></g>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace quadvo::tools
