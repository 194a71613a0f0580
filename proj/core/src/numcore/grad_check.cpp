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

#include "quadvo/numcore/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace quadvo::numcore {

namespace {

struct Evaluation {
  double loss = 0.0;
  std::uint64_t kinks = 0;
};

Evaluation evaluate(GradCheckProblem& problem) {
  Tape tape;
  tape.set_track_kinks(true);
  std::vector<Var> leaves;
  leaves.reserve(problem.params.size());
  for (Parameter& p : problem.params) leaves.push_back(tape.parameter(p));
  const Var loss = problem.loss(tape, leaves);
  return {loss.value()[0], tape.kink_signature()};
}

}  // namespace

GradCheckResult grad_check(const GradCheckBuilder& builder, int trials,
                           double h, std::size_t max_coords_per_param,
                           std::uint64_t first_seed) {
  GradCheckResult result;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(trial);
    GradCheckProblem problem = builder(seed);
    for (Parameter& p : problem.params) p.zero_grad();

    std::uint64_t base_kinks = 0;
    {
      Tape tape;
      tape.set_track_kinks(true);
      std::vector<Var> leaves;
      for (Parameter& p : problem.params) leaves.push_back(tape.parameter(p));
      const Var loss = problem.loss(tape, leaves);
      tape.backward(loss);
      base_kinks = tape.kink_signature();
    }

    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
    for (Parameter& p : problem.params) {
      std::vector<std::size_t> coords(p.value.size());
      std::iota(coords.begin(), coords.end(), std::size_t{0});
      if (max_coords_per_param != 0 && coords.size() > max_coords_per_param) {
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(max_coords_per_param);
      }
      const Tensor analytic = p.grad;
      for (std::size_t i : coords) {
        const double original = p.value[i];
        p.value[i] = original + h;
        const Evaluation plus = evaluate(problem);
        p.value[i] = original - h;
        const Evaluation minus = evaluate(problem);
        p.value[i] = original;
        if (plus.kinks != base_kinks || minus.kinks != base_kinks) {
          ++result.skipped_kinks;
          continue;
        }
        const double numeric = (plus.loss - minus.loss) / (2.0 * h);
        const double a = analytic[i];
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
        result.max_rel_error =
            std::max(result.max_rel_error, std::abs(a - numeric) / denom);
        ++result.checked;
      }
    }
  }
  return result;
}

}  // namespace quadvo::numcore
