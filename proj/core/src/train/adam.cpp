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

#include "quadvo/train/adam.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace quadvo::train {

AdamState adam_init(std::span<Parameter* const> params) {
  AdamState s;
  for (const Parameter* p : params) {
    s.m.emplace_back(p->value.shape(), 0.0);
    s.v.emplace_back(p->value.shape(), 0.0);
  }
  return s;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, double lr,
               const AdamOptions& options) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: state holds " + std::to_string(state.m.size()) +
                                " moments for " + std::to_string(params.size()) +
                                " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    if (p.grad.shape() != p.value.shape() || state.m[i].shape() != p.value.shape() ||
        state.v[i].shape() != p.value.shape()) {
      throw numcore::ShapeError("adam_step: shape mismatch for parameter '" + p.name + "'");
    }
    if (!p.grad.all_finite()) {
      throw numcore::NumericError("adam_step: non-finite gradient in parameter '" +
                                  p.name + "'");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    double* theta = p.value.data().data();
    const double* g = p.grad.data().data();
    double* m = state.m[i].data().data();
    double* v = state.v[i].data().data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = options.beta1 * m[k] + (1.0 - options.beta1) * g[k];
      v[k] = options.beta2 * v[k] + (1.0 - options.beta2) * g[k] * g[k];
      theta[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + options.epsilon);
    }
  }
}

}  // namespace quadvo::train
