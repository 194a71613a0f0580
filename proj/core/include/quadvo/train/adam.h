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

#ifndef QUADVO_TRAIN_ADAM_H_
#define QUADVO_TRAIN_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "quadvo/numcore/tensor.h"

namespace quadvo::train {

using numcore::Parameter;
using numcore::Tensor;

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;  // first moments, one per parameter
  std::vector<Tensor> v;  // second moments
  std::uint64_t step = 0;
};

/// Zero moments shaped like `params`.
AdamState adam_init(std::span<Parameter* const> params);

/// One bias-corrected Adam update from Parameter::grad:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// Throws numcore::NumericError naming the first parameter with a
/// non-finite gradient; nothing is modified in that case.
void adam_step(std::span<Parameter* const> params, AdamState& state, double lr,
               const AdamOptions& options = {});

}  // namespace quadvo::train

#endif  // QUADVO_TRAIN_ADAM_H_
