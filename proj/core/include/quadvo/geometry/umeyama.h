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

#ifndef QUADVO_GEOMETRY_UMEYAMA_H_
#define QUADVO_GEOMETRY_UMEYAMA_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "quadvo/geometry/pose.h"

namespace quadvo::geometry {

/// x -> scale * rotation * x + translation
struct Similarity {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }
  /// Maps a camera pose into the target frame: position transformed, the
  /// orientation rotated (scale only affects positions).
  PoseMatrix apply(const PoseMatrix& pose) const;
};

struct Alignment {
  Similarity transform;
  std::vector<Eigen::Vector3d> aligned;
};

/// Closed-form least-squares alignment of `est` onto `gt` (Umeyama 1991):
/// minimises sum ||s R est_i + t - gt_i||^2. With `with_scale` false, s = 1.
/// Throws std::invalid_argument on length mismatch or fewer than 3 points.
Alignment umeyama_align(std::span<const Eigen::Vector3d> est,
                        std::span<const Eigen::Vector3d> gt, bool with_scale);

std::vector<Eigen::Vector3d> positions(std::span<const PoseMatrix> poses);

}  // namespace quadvo::geometry

#endif  // QUADVO_GEOMETRY_UMEYAMA_H_
