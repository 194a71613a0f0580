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

#ifndef QUADVO_MODEL_QUADRANTS_H_
#define QUADVO_MODEL_QUADRANTS_H_

#include <array>

#include "quadvo/flow/image.h"

namespace quadvo::model {

using flow::FlowField;

enum Quadrant { kTopLeft = 0, kTopRight = 1, kBottomLeft = 2, kBottomRight = 3 };

/// Four equally sized sub-fields ordered TL, TR, BL, BR.
struct QuadrantSet {
  std::array<FlowField, 4> quads;

  int width() const { return quads[0].width(); }
  int height() const { return quads[0].height(); }
};

/// Drops the last column/row of odd-sized fields, then splits at the
/// midpoints. Throws std::invalid_argument for fields narrower or shorter
/// than 2.
QuadrantSet split_quadrants(const FlowField& field);

/// Inverse of split_quadrants on the even-cropped field.
FlowField reassemble(const QuadrantSet& set);

}  // namespace quadvo::model

#endif  // QUADVO_MODEL_QUADRANTS_H_
