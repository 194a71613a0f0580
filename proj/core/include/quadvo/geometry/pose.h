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

#ifndef QUADVO_GEOMETRY_POSE_H_
#define QUADVO_GEOMETRY_POSE_H_

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace quadvo::geometry {

/// 3x4 rigid transform [R|T] in KITTI odometry convention (camera to the
/// sequence origin frame).
struct PoseMatrix {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static PoseMatrix identity() { return {}; }
  static PoseMatrix from_row_major(std::span<const double, 12> values);
  std::array<double, 12> row_major() const;

  PoseMatrix inverse() const;
  PoseMatrix operator*(const PoseMatrix& rhs) const;

  /// R^T R = I and det(R) = 1, both within `tolerance`.
  bool has_valid_rotation(double tolerance = 1e-6) const;

  friend bool operator==(const PoseMatrix& a, const PoseMatrix& b) {
    return a.rotation == b.rotation && a.translation == b.translation;
  }
};

/// Frame-to-frame planar motion: travelled distance and heading change.
struct PoseIncrement {
  double dp = 0.0;    // metres, >= 0
  double dphi = 0.0;  // radians, in (-pi, pi]

  friend bool operator==(const PoseIncrement&, const PoseIncrement&) = default;
};

/// Accumulated heading and ground-plane position.
struct PlanarState {
  double phi = 0.0;
  double tx = 0.0;
  double tz = 0.0;
};

struct Trajectory {
  std::vector<PlanarState> states;  // states[0] is the origin
  std::vector<PoseMatrix> poses;    // one per state
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Heading read from a pose: atan2(-R[0][2], R[0][0]).
double heading(const PoseMatrix& pose);

/// Pose of a planar state:
///   [[cos phi, 0, -sin phi, tx], [0, 1, 0, 0], [sin phi, 0, cos phi, tz]]
PoseMatrix planar_pose(const PlanarState& state);

/// Increment between two consecutive poses. dphi is the wrapped heading
/// difference; dp is the full 3-D distance between the translations.
/// Throws std::invalid_argument if either rotation is not orthonormal.
PoseIncrement decompose(const PoseMatrix& prev, const PoseMatrix& curr);

/// decompose() over each consecutive pair.
std::vector<PoseIncrement> decompose_sequence(std::span<const PoseMatrix> poses);

/// Integrates increments from the origin:
///   phi_t = phi_{t-1} + dphi_t
///   tx_t  = tx_{t-1} + dp_t cos(phi_t)
///   tz_t  = tz_{t-1} + dp_t sin(phi_t)
/// Returns n + 1 states and poses for n increments.
Trajectory accumulate(std::span<const PoseIncrement> increments);

}  // namespace quadvo::geometry

#endif  // QUADVO_GEOMETRY_POSE_H_
