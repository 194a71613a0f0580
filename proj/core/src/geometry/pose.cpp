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

#include "quadvo/geometry/pose.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

namespace quadvo::geometry {

PoseMatrix PoseMatrix::from_row_major(std::span<const double, 12> v) {
  PoseMatrix p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = v[r * 4 + c];
    p.translation(r) = v[r * 4 + 3];
  }
  return p;
}

std::array<double, 12> PoseMatrix::row_major() const {
  std::array<double, 12> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out[r * 4 + c] = rotation(r, c);
    out[r * 4 + 3] = translation(r);
  }
  return out;
}

PoseMatrix PoseMatrix::inverse() const {
  PoseMatrix inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

PoseMatrix PoseMatrix::operator*(const PoseMatrix& rhs) const {
  PoseMatrix out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool PoseMatrix::has_valid_rotation(double tolerance) const {
  const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tolerance &&
         std::abs(rotation.determinant() - 1.0) <= tolerance;
}

double wrap_angle(double radians) {
  const double w = std::atan2(std::sin(radians), std::cos(radians));
  return w <= -std::numbers::pi ? std::numbers::pi : w;
}

double heading(const PoseMatrix& pose) {
  return std::atan2(-pose.rotation(0, 2), pose.rotation(0, 0));
}

PoseMatrix planar_pose(const PlanarState& s) {
  const double c = std::cos(s.phi);
  const double sn = std::sin(s.phi);
  PoseMatrix p;
  p.rotation << c, 0.0, -sn,
                0.0, 1.0, 0.0,
                sn, 0.0, c;
  p.translation << s.tx, 0.0, s.tz;
  return p;
}

PoseIncrement decompose(const PoseMatrix& prev, const PoseMatrix& curr) {
  if (!prev.has_valid_rotation() || !curr.has_valid_rotation()) {
    throw std::invalid_argument("decompose: pose rotation is not orthonormal");
  }
  PoseIncrement inc;
  inc.dphi = wrap_angle(heading(curr) - heading(prev));
  inc.dp = (curr.translation - prev.translation).norm();
  return inc;
}

std::vector<PoseIncrement> decompose_sequence(std::span<const PoseMatrix> poses) {
  std::vector<PoseIncrement> out;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    out.push_back(decompose(poses[i - 1], poses[i]));
  }
  return out;
}

Trajectory accumulate(std::span<const PoseIncrement> increments) {
  Trajectory t;
  t.states.reserve(increments.size() + 1);
  t.poses.reserve(increments.size() + 1);
  PlanarState s;
  t.states.push_back(s);
  t.poses.push_back(planar_pose(s));
  for (const PoseIncrement& inc : increments) {
    s.phi += inc.dphi;
    s.tx += inc.dp * std::cos(s.phi);
    s.tz += inc.dp * std::sin(s.phi);
    t.states.push_back(s);
    t.poses.push_back(planar_pose(s));
  }
  return t;
}

}  // namespace quadvo::geometry
