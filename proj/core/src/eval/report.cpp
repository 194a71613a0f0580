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

#include "quadvo/eval/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace quadvo::eval {

namespace {

struct Accumulator {
  std::size_t count = 0;
  double t = 0.0;
  double r = 0.0;

  void add(const SegmentError& e, Aggregation mode) {
    ++count;
    if (mode == Aggregation::kRms) {
      t += e.t_err * e.t_err;
      r += e.r_err * e.r_err;
    } else {
      t += e.t_err;
      r += e.r_err;
    }
  }

  void finish(Bucket& b, Aggregation mode) const {
    b.count = count;
    if (count == 0) return;
    double mt = t / static_cast<double>(count);
    double mr = r / static_cast<double>(count);
    if (mode == Aggregation::kRms) {
      mt = std::sqrt(mt);
      mr = std::sqrt(mr);
    }
    b.t_err_pct = mt * 100.0;
    b.r_err_deg_per_100m = to_deg_per_100m(mr);
  }
};

std::size_t speed_bin(double speed, const std::vector<double>& edges) {
  const std::size_t bins = edges.size() - 1;
  for (std::size_t i = 0; i < bins; ++i) {
    if (speed < edges[i + 1]) return i;
  }
  return bins - 1;
}

const char* aggregation_name(Aggregation a) {
  return a == Aggregation::kRms ? "rms" : "mean";
}

}  // namespace

EvalReport aggregate(std::span<const SegmentError> errors,
                     const AggregateOptions& options) {
  if (options.speed_edges.size() < 2) {
    throw std::invalid_argument("aggregate: need at least two speed edges");
  }
  EvalReport report;
  report.aggregation = options.aggregation;
  std::vector<Accumulator> by_length(options.lengths.size());
  std::vector<Accumulator> by_speed(options.speed_edges.size() - 1);
  Accumulator overall;
  for (const SegmentError& e : errors) {
    overall.add(e, options.aggregation);
    for (std::size_t i = 0; i < options.lengths.size(); ++i) {
      if (options.lengths[i] == e.length) by_length[i].add(e, options.aggregation);
    }
    by_speed[speed_bin(e.speed, options.speed_edges)].add(e, options.aggregation);
  }
  for (std::size_t i = 0; i < options.lengths.size(); ++i) {
    Bucket b;
    b.lower = b.upper = options.lengths[i];
    by_length[i].finish(b, options.aggregation);
    report.by_length.push_back(b);
  }
  for (std::size_t i = 0; i + 1 < options.speed_edges.size(); ++i) {
    Bucket b;
    b.lower = options.speed_edges[i];
    b.upper = options.speed_edges[i + 1];
    by_speed[i].finish(b, options.aggregation);
    report.by_speed.push_back(b);
  }
  Bucket all;
  overall.finish(all, options.aggregation);
  report.count = all.count;
  report.t_rel_pct = all.t_err_pct;
  report.r_rel_deg_per_100m = all.r_err_deg_per_100m;
  return report;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "group,lower,upper,count,t_err_pct,r_err_deg_per_100m\n";
  char buf[256];
  auto row = [&](const char* group, double lo, double hi, std::size_t n, double t,
                 double r) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%zu,%.17g,%.17g\n", group, lo,
                  hi, n, t, r);
    out << buf;
  };
  for (const Bucket& b : report.by_length) {
    row("length", b.lower, b.upper, b.count, b.t_err_pct, b.r_err_deg_per_100m);
  }
  for (const Bucket& b : report.by_speed) {
    row("speed", b.lower, b.upper, b.count, b.t_err_pct, b.r_err_deg_per_100m);
  }
  row("overall", 0.0, 0.0, report.count, report.t_rel_pct, report.r_rel_deg_per_100m);
}

std::string report_json(const EvalReport& report) {
  auto bucket = [](const Bucket& b) {
    return nlohmann::ordered_json{{"lower", b.lower},
                                  {"upper", b.upper},
                                  {"count", b.count},
                                  {"t_err_pct", b.t_err_pct},
                                  {"r_err_deg_per_100m", b.r_err_deg_per_100m}};
  };
  nlohmann::ordered_json j;
  j["aggregation"] = aggregation_name(report.aggregation);
  j["count"] = report.count;
  j["t_rel_pct"] = report.t_rel_pct;
  j["r_rel_deg_per_100m"] = report.r_rel_deg_per_100m;
  j["by_length"] = nlohmann::ordered_json::array();
  for (const Bucket& b : report.by_length) j["by_length"].push_back(bucket(b));
  j["by_speed"] = nlohmann::ordered_json::array();
  for (const Bucket& b : report.by_speed) j["by_speed"].push_back(bucket(b));
  return j.dump(2);
}

void save_report(const EvalReport& report, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  write_report_csv(report, csv);
  std::ofstream js(json_path, std::ios::trunc);
  if (!js) throw std::runtime_error("cannot open " + json_path.string());
  js << report_json(report) << '\n';
}

}  // namespace quadvo::eval
