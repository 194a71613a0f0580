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

#include "oracles.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace quadvo::testing {

Tensor random_tensor(const numcore::Shape& shape, std::uint64_t seed, double lo,
                     double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(shape);
  for (double& v : t.data()) v = u(rng);
  return t;
}

double smooth_texture(std::uint64_t seed, double x, double y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.05, 0.25);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double acc = 0.0;
  constexpr int kWaves = 6;
  for (int i = 0; i < kWaves; ++i) {
    const double f = freq(rng), a = angle(rng), ph = angle(rng);
    acc += std::sin(f * (std::cos(a) * x + std::sin(a) * y) + ph);
  }
  return 0.5 + 0.5 * acc / kWaves;
}

flow::GrayImage smooth_image(std::uint64_t seed, int width, int height, double shift_x,
                             double shift_y) {
  flow::GrayImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img(x, y) = smooth_texture(seed, x - shift_x, y - shift_y);
    }
  }
  return img;
}

Tensor conv2d_loop(const Tensor& in, const Tensor& k, const Tensor& b,
                   std::size_t stride, std::size_t pad) {
  const std::size_t c = in.dim(0), h = in.dim(1), w = in.dim(2);
  const std::size_t o = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  const std::size_t oh = (h + 2 * pad - kh) / stride + 1;
  const std::size_t ow = (w + 2 * pad - kw) / stride + 1;
  Tensor out({o, oh, ow});
  for (std::size_t oc = 0; oc < o; ++oc) {
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        double s = b[oc];
        for (std::size_t ic = 0; ic < c; ++ic) {
          for (std::size_t a = 0; a < kh; ++a) {
            for (std::size_t q = 0; q < kw; ++q) {
              const long y = static_cast<long>(i * stride + a) - static_cast<long>(pad);
              const long x = static_cast<long>(j * stride + q) - static_cast<long>(pad);
              if (y < 0 || x < 0 || y >= static_cast<long>(h) || x >= static_cast<long>(w)) {
                continue;
              }
              s += k[((oc * c + ic) * kh + a) * kw + q] * in.at(ic, y, x);
            }
          }
        }
        out.at(oc, i, j) = s;
      }
    }
  }
  return out;
}

Tensor pool2d_loop(const Tensor& in, numcore::PoolKind kind, std::size_t k,
                   std::size_t stride, std::size_t pad) {
  const std::size_t c = in.dim(0), h = in.dim(1), w = in.dim(2);
  const std::size_t oh = (h + 2 * pad - k) / stride + 1;
  const std::size_t ow = (w + 2 * pad - k) / stride + 1;
  Tensor out({c, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        double s = 0.0, m = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a) {
          for (std::size_t q = 0; q < k; ++q) {
            const long y = static_cast<long>(i * stride + a) - static_cast<long>(pad);
            const long x = static_cast<long>(j * stride + q) - static_cast<long>(pad);
            if (y < 0 || x < 0 || y >= static_cast<long>(h) || x >= static_cast<long>(w)) {
              continue;
            }
            s += in.at(ch, y, x);
            m = std::max(m, in.at(ch, y, x));
          }
        }
        out.at(ch, i, j) = kind == numcore::PoolKind::kAverage ? s / (k * k) : m;
      }
    }
  }
  return out;
}

Tensor dense_loop(const Tensor& in, const Tensor& w, const Tensor& b) {
  const std::size_t m = w.dim(0), n = w.dim(1);
  Tensor out({m});
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < n; ++j) s += w[i * n + j] * in[j];
    out[i] = s;
  }
  return out;
}

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> mlp(const model::CbamParams& p, const std::vector<double>& v) {
  const std::size_t hid = p.mlp1_weight.value.dim(0), c = v.size();
  std::vector<double> hidden(hid), out(c);
  for (std::size_t i = 0; i < hid; ++i) {
    double s = p.mlp1_bias.value[i];
    for (std::size_t j = 0; j < c; ++j) s += p.mlp1_weight.value[i * c + j] * v[j];
    hidden[i] = std::max(0.0, s);
  }
  for (std::size_t i = 0; i < c; ++i) {
    double s = p.mlp2_bias.value[i];
    for (std::size_t j = 0; j < hid; ++j) s += p.mlp2_weight.value[i * hid + j] * hidden[j];
    out[i] = s;
  }
  return out;
}

}  // namespace

Tensor cbam_loop(const Tensor& m, const model::CbamParams& p) {
  const std::size_t c = m.dim(0), h = m.dim(1), w = m.dim(2);
  std::vector<double> avg(c, 0.0), mx(c, -std::numeric_limits<double>::infinity());
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        avg[ch] += m.at(ch, y, x);
        mx[ch] = std::max(mx[ch], m.at(ch, y, x));
      }
    }
    avg[ch] /= static_cast<double>(h * w);
  }
  const std::vector<double> a = mlp(p, avg), b = mlp(p, mx);
  Tensor m1({c, h, w});
  for (std::size_t ch = 0; ch < c; ++ch) {
    const double g = sig(a[ch] + b[ch]);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) m1.at(ch, y, x) = g * m.at(ch, y, x);
    }
  }
  Tensor pooled({2, h, w});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double s = 0.0, q = -std::numeric_limits<double>::infinity();
      for (std::size_t ch = 0; ch < c; ++ch) {
        s += m1.at(ch, y, x);
        q = std::max(q, m1.at(ch, y, x));
      }
      pooled.at(0, y, x) = s / static_cast<double>(c);
      pooled.at(1, y, x) = q;
    }
  }
  const Tensor att = conv2d_loop(pooled, p.spatial_weight.value, p.spatial_bias.value, 1,
                                 model::kSpatialPad);
  Tensor out({c, h, w});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.at(ch, y, x) = sig(att.at(0, y, x)) * m1.at(ch, y, x);
      }
    }
  }
  return out;
}

namespace {

Eigen::Matrix4d homogeneous(const geometry::PoseMatrix& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  const auto v = p.row_major();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
  }
  return m;
}

}  // namespace

std::vector<OracleSegment> segment_errors_brute(
    std::span<const geometry::PoseMatrix> gt, std::span<const geometry::PoseMatrix> est,
    const std::vector<double>& lengths, std::size_t step, double frame_period) {
  std::vector<double> dist(gt.size(), 0.0);
  for (std::size_t i = 1; i < gt.size(); ++i) {
    const Eigen::Vector4d a = homogeneous(gt[i - 1]).col(3);
    const Eigen::Vector4d b = homogeneous(gt[i]).col(3);
    dist[i] = dist[i - 1] + (b - a).norm();
  }
  std::vector<OracleSegment> out;
  for (std::size_t first = 0; first < gt.size(); first += step) {
    for (double len : lengths) {
      std::size_t last = first;
      while (last < gt.size() && dist[last] - dist[first] < len) ++last;
      if (last >= gt.size()) continue;
      const Eigen::Matrix4d dg = homogeneous(gt[first]).inverse() * homogeneous(gt[last]);
      const Eigen::Matrix4d de = homogeneous(est[first]).inverse() * homogeneous(est[last]);
      const Eigen::Matrix4d err = de.inverse() * dg;
      const double tr = err(0, 0) + err(1, 1) + err(2, 2);
      const double d = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
      OracleSegment s;
      s.first = first;
      s.last = last;
      s.length = len;
      s.t_err = err.block<3, 1>(0, 3).norm() / len;
      s.r_err = std::acos(d) / len;
      s.speed = len / (frame_period * static_cast<double>(last - first + 1));
      out.push_back(s);
    }
  }
  return out;
}

std::vector<geometry::PoseMatrix> random_trajectory(std::uint64_t seed, std::size_t n,
                                                    bool three_d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(0.5, 1.5), turn(-0.05, 0.05),
      wobble(-0.01, 0.01);
  std::vector<geometry::PoseMatrix> out;
  double yaw = 0.0;
  Eigen::Vector3d pos = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    geometry::PoseMatrix p;
    p.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
    if (three_d) {
      p.rotation = p.rotation *
                   Eigen::AngleAxisd(wobble(rng), Eigen::Vector3d::UnitX()).toRotationMatrix();
    }
    p.translation = pos;
    out.push_back(p);
    yaw += turn(rng);
    const double d = step(rng);
    pos += d * Eigen::Vector3d(std::sin(yaw), three_d ? wobble(rng) : 0.0, std::cos(yaw));
  }
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("quadvo_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace quadvo::testing
