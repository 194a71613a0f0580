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

#ifndef QUADVO_NUMCORE_GRAD_CHECK_H_
#define QUADVO_NUMCORE_GRAD_CHECK_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quadvo/numcore/tape.h"
#include "quadvo/numcore/tensor.h"

namespace quadvo::numcore {

/// A randomly seeded scalar computation over a set of parameters.
struct GradCheckProblem {
  std::vector<Parameter> params;
  /// Builds the scalar loss on `tape` from the bound parameter leaves.
  std::function<Var(Tape& tape, std::span<const Var> params)> loss;
};

using GradCheckBuilder = std::function<GradCheckProblem(std::uint64_t seed)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  /// Coordinates whose +/-h perturbation changed a relu/max branch choice;
  /// finite differences are meaningless across a kink.
  std::size_t skipped_kinks = 0;
};

/// Compares reverse-mode gradients with central differences. The error of a
/// coordinate is |analytic - numeric| / max(|analytic|, |numeric|, 1e-8);
/// the result is the maximum over trials and checked coordinates. At most
/// `max_coords_per_param` coordinates (chosen by the trial seed) are probed
/// per parameter; 0 probes all of them.
GradCheckResult grad_check(const GradCheckBuilder& builder, int trials,
                           double h = 1e-5,
                           std::size_t max_coords_per_param = 0,
                           std::uint64_t first_seed = 1);

}  // namespace quadvo::numcore

#endif  // QUADVO_NUMCORE_GRAD_CHECK_H_
