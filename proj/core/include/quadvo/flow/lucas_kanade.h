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

#ifndef QUADVO_FLOW_LUCAS_KANADE_H_
#define QUADVO_FLOW_LUCAS_KANADE_H_

#include "quadvo/flow/image.h"

namespace quadvo::flow {

struct LkOptions {
  int window = 15;           // odd, >= 3
  int levels = 3;            // pyramid levels, >= 1
  int iterations = 3;        // warp/solve rounds per level
  double min_eigenvalue = 1e-6;  // on the window-averaged structure matrix
};

/// Dense pyramidal Lucas-Kanade. For every pixel the 2x2 normal equations of
/// the brightness-constancy constraint are accumulated over a square window
/// and solved for a flow increment; `next` is re-warped by the running
/// estimate between rounds. Pixels whose structure matrix is near singular
/// keep the flow propagated from the coarser level.
///
/// The returned field maps `prev` pixels to their location in `next`:
/// prev(x, y) ~ next(x + u, y + v).
FlowField lk_flow(const GrayImage& prev, const GrayImage& next,
                  const LkOptions& options = {});

/// Bilinear warp of `image` by `field`: out(x, y) = image(x + u, y + v),
/// clamped at the border.
GrayImage warp(const GrayImage& image, const FlowField& field);

}  // namespace quadvo::flow

#endif  // QUADVO_FLOW_LUCAS_KANADE_H_
