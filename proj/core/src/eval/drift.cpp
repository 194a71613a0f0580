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

#include "quadvo/eval/drift.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace quadvo::eval {

std::vector<double> trajectory_distances(std::span<const PoseMatrix> gt) {
  std::vector<double> dist;
  dist.reserve(gt.size());
  if (gt.empty()) return dist;
  dist.push_back(0.0);
  for (std::size_t i = 1; i < gt.size(); ++i) {
    dist.push_back(dist.back() + (gt[i].translation - gt[i - 1].translation).norm());
  }
  return dist;
}

std::size_t segment_end(std::span<const double> dist, std::size_t first,
                        double length) {
  for (std::size_t j = first; j < dist.size(); ++j) {
    if (dist[j] - dist[first] >= length) return j;
  }
  return dist.size();
}

double rotation_angle(const Eigen::Matrix3d& r) {
  // atan2 form stays accurate near zero, where acos of the trace does not.
  const Eigen::Vector3d axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * axis.norm(), 0.5 * (r.trace() - 1.0));
}

std::vector<SegmentError> segment_errors(std::span<const PoseMatrix> gt,
                                         std::span<const PoseMatrix> est,
                                         const SegmentOptions& options) {
  if (gt.size() != est.size()) {
    throw std::invalid_argument("segment_errors: trajectories differ in length (" +
                                std::to_string(gt.size()) + " vs " +
                                std::to_string(est.size()) + ")");
  }
  if (gt.size() < 2) {
    throw std::invalid_argument("segment_errors: need at least 2 poses");
  }
  if (options.step == 0) throw std::invalid_argument("segment_errors: step must be >= 1");
  if (!(options.frame_period > 0.0)) {
    throw std::invalid_argument("segment_errors: frame period must be positive");
  }
  const std::vector<double> dist = trajectory_distances(gt);
  std::vector<SegmentError> out;
  for (std::size_t first = 0; first < gt.size(); first += options.step) {
    for (double length : options.lengths) {
      const std::size_t last = segment_end(dist, first, length);
      if (last >= gt.size()) continue;
      const PoseMatrix delta_gt = gt[first].inverse() * gt[last];
      const PoseMatrix delta_est = est[first].inverse() * est[last];
      const PoseMatrix e = delta_gt.inverse() * delta_est;
      SegmentError s;
      s.first_frame = first;
      s.last_frame = last;
      s.length = length;
      s.t_err = e.translation.norm() / length;
      s.r_err = rotation_angle(e.rotation) / length;
      s.speed = length / (static_cast<double>(last - first + 1) * options.frame_period);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace quadvo::eval
