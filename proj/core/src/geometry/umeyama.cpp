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

#include "quadvo/geometry/umeyama.h"

#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace quadvo::geometry {

PoseMatrix Similarity::apply(const PoseMatrix& pose) const {
  PoseMatrix out;
  out.rotation = rotation * pose.rotation;
  out.translation = apply(pose.translation);
  return out;
}

Alignment umeyama_align(std::span<const Eigen::Vector3d> est,
                        std::span<const Eigen::Vector3d> gt, bool with_scale) {
  if (est.size() != gt.size()) {
    throw std::invalid_argument("umeyama_align: point sequences differ in length (" +
                                std::to_string(est.size()) + " vs " +
                                std::to_string(gt.size()) + ")");
  }
  if (est.size() < 3) {
    throw std::invalid_argument("umeyama_align: need at least 3 points");
  }
  const double n = static_cast<double>(est.size());
  Eigen::Vector3d mu_x = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_y = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < est.size(); ++i) {
    mu_x += est[i];
    mu_y += gt[i];
  }
  mu_x /= n;
  mu_y /= n;

  double var_x = 0.0;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < est.size(); ++i) {
    const Eigen::Vector3d dx = est[i] - mu_x;
    const Eigen::Vector3d dy = gt[i] - mu_y;
    var_x += dx.squaredNorm();
    cov += dy * dx.transpose();
  }
  var_x /= n;
  cov /= n;

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) s(2, 2) = -1.0;

  Alignment out;
  Similarity& t = out.transform;
  t.rotation = svd.matrixU() * s * svd.matrixV().transpose();
  t.scale = 1.0;
  if (with_scale) {
    if (var_x <= 0.0) {
      throw std::invalid_argument("umeyama_align: source points are all identical");
    }
    t.scale = svd.singularValues().dot(s.diagonal()) / var_x;
  }
  t.translation = mu_y - t.scale * (t.rotation * mu_x);
  out.aligned.reserve(est.size());
  for (const Eigen::Vector3d& p : est) out.aligned.push_back(t.apply(p));
  return out;
}

std::vector<Eigen::Vector3d> positions(std::span<const PoseMatrix> poses) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(poses.size());
  for (const PoseMatrix& p : poses) out.push_back(p.translation);
  return out;
}

}  // namespace quadvo::geometry
