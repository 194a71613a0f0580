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

#ifndef QUADVO_DATASET_SYNTH_H_
#define QUADVO_DATASET_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quadvo/flow/image.h"
#include "quadvo/geometry/pose.h"

namespace quadvo::dataset {

using flow::FlowField;
using flow::GrayImage;
using geometry::PoseIncrement;

/// A pinhole camera tilted down by `pitch` above a flat textured ground
/// plane. Level axes: x right, y down, z forward; the ground is the plane
/// y = camera_height. Pixels whose forward ground distance exceeds
/// sky_distance (or that look above the horizon) show a constant sky.
struct SceneSpec {
  std::uint64_t seed = 1;  // texture seed
  int width = 256;
  int height = 96;
  double focal = 200.0;         // pixels
  double camera_height = 1.5;   // metres
  int octaves = 4;              // value-noise octaves
  double cell = 0.3;            // metres per lattice cell of the coarsest octave
  double sky_distance = 40.0;   // metres
  double sky_value = 0.6;
  int supersample = 3;          // n x n rays per pixel
  double pitch = 0.3;           // radians, positive looks down

  double cx() const { return 0.5 * (width - 1); }
  double cy() const { return 0.5 * (height - 1); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Ground-plane camera pose: heading psi (radians, positive turns the view
/// from +z towards +x) and position (x, z).
struct CameraState {
  double psi = 0.0;
  double x = 0.0;
  double z = 0.0;
};

/// One step of planar motion: heading first, then dp along the new heading.
CameraState advance(const CameraState& state, const PoseIncrement& inc);

/// Texture intensity at a ground point, in [0.05, 0.95].
double ground_texture(const SceneSpec& spec, double x, double z);

GrayImage render_view(const SceneSpec& spec, const CameraState& state);

struct Sample {
  GrayImage prev;
  GrayImage next;
  std::optional<FlowField> flow;  // precomputed flow prev -> next, if any
  PoseIncrement gt;
};

/// Camera moves by `inc` from the origin. `prev` is rendered; `next` is
/// `prev` resampled through the ground-plane homography (bilinear, border
/// clamp). Throws std::invalid_argument if more than 30% of the ground
/// pixels of `next` map outside `prev`.
Sample render_pair(const SceneSpec& spec, const PoseIncrement& inc);

/// Frames rendered at the states reached by applying `increments` in order
/// from the origin: n increments give n + 1 frames.
std::vector<GrayImage> render_sequence(const SceneSpec& spec,
                                       std::span<const PoseIncrement> increments);

/// Exact ground-plane motion of every `prev` pixel under `inc`, in the
/// lk_flow convention prev(x, y) ~ next(x + u, y + v). `valid` marks pixels
/// that see the ground in both views and stay inside the frame.
struct AnalyticFlow {
  FlowField field;
  std::vector<std::uint8_t> valid;
};
AnalyticFlow analytic_flow(const SceneSpec& spec, const PoseIncrement& inc);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Smooth bounded random walk. dp starts uniform in its range and moves by
/// at most 5% of the range per step; dphi starts uniform and moves by at
/// most 0.015 rad per step. Both are clamped to their ranges.
/// Requires 0 <= dp.lo <= dp.hi <= 3 and -0.2 <= dphi.lo <= dphi.hi <= 0.2.
std::vector<PoseIncrement> synth_increments(std::uint64_t seed, std::size_t n,
                                            Range dp, Range dphi);

}  // namespace quadvo::dataset

#endif  // QUADVO_DATASET_SYNTH_H_
