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

#include "quadvo/flow/image.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace quadvo::flow {

namespace {

void check_size(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dimensions must be positive, got " +
                                std::to_string(width) + "x" +
                                std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  check_size(width, height);
  if (!(fill >= 0.0 && fill <= 1.0)) {
    throw std::invalid_argument("intensity fill outside [0, 1]");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_size(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("pixel count does not match image dimensions");
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("intensity outside [0, 1]: " + std::to_string(p));
    }
  }
}

double GrayImage::sample(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = std::min(static_cast<int>(x), width_ - 1);
  const int y0 = std::min(static_cast<int>(y), height_ - 1);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (*this)(x0, y0) + fx * ((*this)(x1, y0) - (*this)(x0, y0));
  const double bottom = (*this)(x0, y1) + fx * ((*this)(x1, y1) - (*this)(x0, y1));
  return top + fy * (bottom - top);
}

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  check_size(width, height);
  u_.assign(static_cast<std::size_t>(width) * height, 0.0);
  v_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

bool FlowField::all_finite() const {
  auto finite = [](double d) { return std::isfinite(d); };
  return std::all_of(u_.begin(), u_.end(), finite) &&
         std::all_of(v_.begin(), v_.end(), finite);
}

GrayImage downsample(const GrayImage& image) {
  const int w = image.width() / 2;
  const int h = image.height() / 2;
  if (w == 0 || h == 0) {
    throw std::invalid_argument("image too small to downsample");
  }
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out[static_cast<std::size_t>(y) * w + x] =
          0.25 * (image(2 * x, 2 * y) + image(2 * x + 1, 2 * y) +
                  image(2 * x, 2 * y + 1) + image(2 * x + 1, 2 * y + 1));
    }
  }
  return GrayImage(w, h, std::move(out));
}

Pyramid build_pyramid(const GrayImage& image, int levels, int min_size) {
  if (levels < 1) throw std::invalid_argument("pyramid needs at least one level");
  Pyramid p;
  p.levels.push_back(image);
  for (int l = 1; l < levels; ++l) {
    const GrayImage& prev = p.levels.back();
    if (prev.width() / 2 < min_size || prev.height() / 2 < min_size) {
      throw std::invalid_argument(
          "image " + std::to_string(image.width()) + "x" +
          std::to_string(image.height()) + " is smaller than the window " +
          std::to_string(min_size) + " at pyramid level " + std::to_string(l));
    }
    p.levels.push_back(downsample(prev));
  }
  if (p.levels.front().width() < min_size || p.levels.front().height() < min_size) {
    throw std::invalid_argument("image smaller than the window " +
                                std::to_string(min_size));
  }
  return p;
}

ImageGradients gradients(const GrayImage& prev, const GrayImage& next) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw std::invalid_argument("gradients: image dimensions differ");
  }
  const int w = prev.width();
  const int h = prev.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  ImageGradients g;
  g.ix = {w, h, std::vector<double>(n)};
  g.iy = {w, h, std::vector<double>(n)};
  g.it = {w, h, std::vector<double>(n)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double dx = 0.0;
      if (w > 1) {
        if (x == 0) {
          dx = prev(1, y) - prev(0, y);
        } else if (x == w - 1) {
          dx = prev(w - 1, y) - prev(w - 2, y);
        } else {
          dx = 0.5 * (prev(x + 1, y) - prev(x - 1, y));
        }
      }
      double dy = 0.0;
      if (h > 1) {
        if (y == 0) {
          dy = prev(x, 1) - prev(x, 0);
        } else if (y == h - 1) {
          dy = prev(x, h - 1) - prev(x, h - 2);
        } else {
          dy = 0.5 * (prev(x, y + 1) - prev(x, y - 1));
        }
      }
      g.ix.values[i] = dx;
      g.iy.values[i] = dy;
      g.it.values[i] = next(x, y) - prev(x, y);
    }
  }
  return g;
}

double flow_epe(const FlowField& est, const FlowField& gt, int margin) {
  if (est.width() != gt.width() || est.height() != gt.height()) {
    throw std::invalid_argument("flow_epe: field dimensions differ");
  }
  if (margin < 0 || 2 * margin >= std::min(est.width(), est.height())) {
    throw std::invalid_argument("flow_epe: margin leaves no interior pixels");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (int y = margin; y < est.height() - margin; ++y) {
    for (int x = margin; x < est.width() - margin; ++x) {
      total += std::hypot(est.u(x, y) - gt.u(x, y), est.v(x, y) - gt.v(x, y));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double mean_magnitude(const FlowField& field) {
  double total = 0.0;
  const auto u = field.u_data();
  const auto v = field.v_data();
  for (std::size_t i = 0; i < u.size(); ++i) total += std::hypot(u[i], v[i]);
  return u.empty() ? 0.0 : total / static_cast<double>(u.size());
}

}  // namespace quadvo::flow
