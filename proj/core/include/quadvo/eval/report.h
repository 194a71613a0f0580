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

#ifndef QUADVO_EVAL_REPORT_H_
#define QUADVO_EVAL_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "quadvo/eval/drift.h"

namespace quadvo::eval {

enum class Aggregation { kMean, kRms };

struct AggregateOptions {
  std::vector<double> lengths = {100, 200, 300, 400, 500, 600, 700, 800};
  /// Ascending speed-bin edges in m/s. Bin i is [edges[i], edges[i+1]);
  /// speeds at or beyond the last edge fall into the last bin.
  std::vector<double> speed_edges = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26};
  Aggregation aggregation = Aggregation::kMean;
};

/// Errors in report units: percent and degrees per 100 m.
struct Bucket {
  double lower = 0.0;  // length, or lower speed edge
  double upper = 0.0;  // length, or upper speed edge
  std::size_t count = 0;
  double t_err_pct = 0.0;
  double r_err_deg_per_100m = 0.0;
};

struct EvalReport {
  std::vector<Bucket> by_length;
  std::vector<Bucket> by_speed;
  std::size_t count = 0;
  double t_rel_pct = 0.0;
  double r_rel_deg_per_100m = 0.0;
  Aggregation aggregation = Aggregation::kMean;
};

/// rad/m -> deg/100m.
inline double to_deg_per_100m(double rad_per_m) {
  return rad_per_m * (180.0 / 3.14159265358979323846) * 100.0;
}

/// Per-length and per-speed-bin statistics plus overall values, all taken
/// directly over the segment list (overall is not a mean of bucket means).
EvalReport aggregate(std::span<const SegmentError> errors,
                     const AggregateOptions& options = {});

/// CSV, one row per bucket:
///   group,lower,upper,count,t_err_pct,r_err_deg_per_100m
/// with group in {length, speed, overall}.
void write_report_csv(const EvalReport& report, std::ostream& out);
/// JSON object with keys aggregation, count, t_rel_pct, r_rel_deg_per_100m,
/// by_length[], by_speed[] (bucket objects use the CSV column names).
std::string report_json(const EvalReport& report);

void save_report(const EvalReport& report, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path);

}  // namespace quadvo::eval

#endif  // QUADVO_EVAL_REPORT_H_
