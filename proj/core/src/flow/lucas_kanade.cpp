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

#include "quadvo/flow/lucas_kanade.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadvo::flow {

namespace {

// Window means via a summed-area table; windows are clipped at the border
// and averaged over the cells they actually cover.
class BoxMean {
 public:
  BoxMean(int width, int height, int radius)
      : w_(width), h_(height), r_(radius),
        table_(static_cast<std::size_t>(width + 1) * (height + 1), 0.0) {}

  void operator()(const std::vector<double>& in, std::vector<double>& out) {
    const std::size_t stride = static_cast<std::size_t>(w_) + 1;
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      for (int x = 0; x < w_; ++x) {
        row += in[static_cast<std::size_t>(y) * w_ + x];
        table_[(y + 1) * stride + x + 1] = table_[y * stride + x + 1] + row;
      }
    }
    out.resize(in.size());
    for (int y = 0; y < h_; ++y) {
      const int y0 = std::max(0, y - r_);
      const int y1 = std::min(h_, y + r_ + 1);
      for (int x = 0; x < w_; ++x) {
        const int x0 = std::max(0, x - r_);
        const int x1 = std::min(w_, x + r_ + 1);
        const double s = table_[y1 * stride + x1] - table_[y0 * stride + x1] -
                         table_[y1 * stride + x0] + table_[y0 * stride + x0];
        out[static_cast<std::size_t>(y) * w_ + x] =
            s / static_cast<double>((y1 - y0) * (x1 - x0));
      }
    }
  }

 private:
  int w_, h_, r_;
  std::vector<double> table_;
};

FlowField upsample(const FlowField& coarse, int width, int height) {
  FlowField fine(width, height);
  const int cw = coarse.width();
  const int ch = coarse.height();
  auto sample = [&](std::span<const double> plane, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(cw - 1));
    y = std::clamp(y, 0.0, static_cast<double>(ch - 1));
    const int x0 = std::min(static_cast<int>(x), cw - 1);
    const int y0 = std::min(static_cast<int>(y), ch - 1);
    const int x1 = std::min(x0 + 1, cw - 1);
    const int y1 = std::min(y0 + 1, ch - 1);
    const double fx = x - x0, fy = y - y0;
    auto at = [&](int xx, int yy) { return plane[static_cast<std::size_t>(yy) * cw + xx]; };
    const double top = at(x0, y0) + fx * (at(x1, y0) - at(x0, y0));
    const double bot = at(x0, y1) + fx * (at(x1, y1) - at(x0, y1));
    return top + fy * (bot - top);
  };
  for (int y = 0; y < height; ++y) {
    const double cy = (y - 0.5) / 2.0;
    for (int x = 0; x < width; ++x) {
      const double cx = (x - 0.5) / 2.0;
      fine.u(x, y) = 2.0 * sample(coarse.u_data(), cx, cy);
      fine.v(x, y) = 2.0 * sample(coarse.v_data(), cx, cy);
    }
  }
  return fine;
}

void refine_level(const GrayImage& prev, const GrayImage& next,
                  const LkOptions& options, FlowField& flow) {
  const int w = prev.width();
  const int h = prev.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const ImageGradients g = gradients(prev, prev);
  BoxMean box(w, h, options.window / 2);

  std::vector<double> prod(n), sxx, sxy, syy, sxt, syt;
  for (std::size_t i = 0; i < n; ++i) prod[i] = g.ix.values[i] * g.ix.values[i];
  box(prod, sxx);
  for (std::size_t i = 0; i < n; ++i) prod[i] = g.ix.values[i] * g.iy.values[i];
  box(prod, sxy);
  for (std::size_t i = 0; i < n; ++i) prod[i] = g.iy.values[i] * g.iy.values[i];
  box(prod, syy);

  std::vector<double> it(n);
  for (int iter = 0; iter < options.iterations; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        it[i] = next.sample(x + flow.u(x, y), y + flow.v(x, y)) - prev(x, y);
      }
    }
    for (std::size_t i = 0; i < n; ++i) prod[i] = g.ix.values[i] * it[i];
    box(prod, sxt);
    for (std::size_t i = 0; i < n; ++i) prod[i] = g.iy.values[i] * it[i];
    box(prod, syt);

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        const double a = sxx[i], b = sxy[i], c = syy[i];
        const double half_tr = 0.5 * (a + c);
        const double min_eig =
            half_tr - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        if (min_eig < options.min_eigenvalue) continue;
        const double det = a * c - b * b;
        const double r1 = -sxt[i];
        const double r2 = -syt[i];
        flow.u(x, y) += (c * r1 - b * r2) / det;
        flow.v(x, y) += (a * r2 - b * r1) / det;
      }
    }
  }
}

}  // namespace

FlowField lk_flow(const GrayImage& prev, const GrayImage& next,
                  const LkOptions& options) {
  if (options.window < 3 || options.window % 2 == 0) {
    throw std::invalid_argument("lk_flow: window must be odd and >= 3, got " +
                                std::to_string(options.window));
  }
  if (options.levels < 1) throw std::invalid_argument("lk_flow: levels must be >= 1");
  if (options.iterations < 1) {
    throw std::invalid_argument("lk_flow: iterations must be >= 1");
  }
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw std::invalid_argument("lk_flow: image dimensions differ");
  }
  const Pyramid pp = build_pyramid(prev, options.levels, options.window);
  const Pyramid pn = build_pyramid(next, options.levels, options.window);

  const int top = options.levels - 1;
  FlowField flow(pp.levels[top].width(), pp.levels[top].height());
  for (int level = top; level >= 0; --level) {
    const GrayImage& a = pp.levels[level];
    if (level != top) flow = upsample(flow, a.width(), a.height());
    refine_level(a, pn.levels[level], options, flow);
  }
  return flow;
}

GrayImage warp(const GrayImage& image, const FlowField& field) {
  if (image.width() != field.width() || image.height() != field.height()) {
    throw std::invalid_argument("warp: image and flow dimensions differ");
  }
  std::vector<double> out(static_cast<std::size_t>(image.width()) * image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out[static_cast<std::size_t>(y) * image.width() + x] =
          image.sample(x + field.u(x, y), y + field.v(x, y));
    }
  }
  return GrayImage(image.width(), image.height(), std::move(out));
}

}  // namespace quadvo::flow
