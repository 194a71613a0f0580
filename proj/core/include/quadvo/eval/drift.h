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

#ifndef QUADVO_EVAL_DRIFT_H_
#define QUADVO_EVAL_DRIFT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "quadvo/geometry/pose.h"

namespace quadvo::eval {

using geometry::PoseMatrix;

/// Relative error of one sub-trajectory of a given GT path length.
struct SegmentError {
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;
  double length = 0.0;  // metres, one of the configured lengths
  double t_err = 0.0;   // dimensionless (translation error / length)
  double r_err = 0.0;   // radians per metre
  double speed = 0.0;   // metres per second, segment average
};

struct SegmentOptions {
  std::vector<double> lengths = {100, 200, 300, 400, 500, 600, 700, 800};
  std::size_t step = 10;       // start-frame stride
  double frame_period = 0.1;   // seconds per frame
};

/// d_0 = 0, d_i = d_{i-1} + |T_i - T_{i-1}|.
std::vector<double> trajectory_distances(std::span<const PoseMatrix> gt);

/// Smallest index j >= first with dist[j] - dist[first] >= length, or
/// dist.size() if none exists.
std::size_t segment_end(std::span<const double> dist, std::size_t first,
                        double length);

/// Rotation angle of R in radians, in [0, pi].
double rotation_angle(const Eigen::Matrix3d& r);

/// Relative pose errors over every start frame (stride options.step) and
/// every configured length. For start a and end b:
///   E = (gt_a^-1 gt_b)^-1 (est_a^-1 est_b)
///   t_err = |trans(E)| / L,  r_err = angle(E) / L,
///   speed = L / ((b - a + 1) * frame_period).
/// Segments are ordered by (first_frame, length). A trajectory shorter than
/// every length yields an empty list.
std::vector<SegmentError> segment_errors(std::span<const PoseMatrix> gt,
                                         std::span<const PoseMatrix> est,
                                         const SegmentOptions& options = {});

}  // namespace quadvo::eval

#endif  // QUADVO_EVAL_DRIFT_H_
