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

#include "quadvo/dataset/batching.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>

namespace quadvo::dataset {

std::vector<Batch> make_batches(std::size_t count, std::size_t batch_size,
                                std::uint64_t seed) {
  if (batch_size == 0) throw std::invalid_argument("make_batches: batch size must be >= 1");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = count; i > 1; --i) {
    // Unbiased draw from [0, i).
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % i;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i - 1], order[r % i]);
  }
  std::vector<Batch> out;
  for (std::size_t i = 0; i < count; i += batch_size) {
    const std::size_t end = std::min(count, i + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace quadvo::dataset
