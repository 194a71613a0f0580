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

#ifndef QUADVO_FLOW_IMAGE_H_
#define QUADVO_FLOW_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace quadvo::flow {

/// Row-major grayscale image with intensities in [0, 1]. Constructors reject
/// non-positive sizes and out-of-range intensities.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  double operator()(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }
  double& operator()(int x, int y) {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  /// Bilinear sample at a sub-pixel location; coordinates outside the image
  /// clamp to the border.
  double sample(double x, double y) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Dense per-pixel motion, u horizontal and v vertical, in pixels/frame.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  double& u(int x, int y) { return u_[index(x, y)]; }
  double& v(int x, int y) { return v_[index(x, y)]; }
  double u(int x, int y) const { return u_[index(x, y)]; }
  double v(int x, int y) const { return v_[index(x, y)]; }

  std::span<const double> u_data() const { return u_; }
  std::span<const double> v_data() const { return v_; }
  std::span<double> u_data() { return u_; }
  std::span<double> v_data() { return v_; }

  bool all_finite() const;

  friend bool operator==(const FlowField&, const FlowField&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
};

/// 2x2 mean downsample with floor dimensions.
GrayImage downsample(const GrayImage& image);

/// Coarse-to-fine image stack; level 0 is full resolution.
struct Pyramid {
  std::vector<GrayImage> levels;
};

/// Builds `levels` levels. Throws std::invalid_argument if any level would be
/// narrower or shorter than `min_size`.
Pyramid build_pyramid(const GrayImage& image, int levels, int min_size);

/// Unbounded real-valued map on the pixel grid (derivatives, residuals).
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double operator()(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct ImageGradients {
  ScalarField ix;
  ScalarField iy;
  ScalarField it;
};

/// Ix, Iy by central differences on `prev` (one-sided at borders) and
/// It = next - prev.
ImageGradients gradients(const GrayImage& prev, const GrayImage& next);

/// Mean endpoint error over pixels at least `margin` away from every border.
double flow_epe(const FlowField& est, const FlowField& gt, int margin);

/// Mean of sqrt(u^2 + v^2) over all pixels.
double mean_magnitude(const FlowField& field);

}  // namespace quadvo::flow

#endif  // QUADVO_FLOW_IMAGE_H_
