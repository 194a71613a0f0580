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

#ifndef QUADVO_DATASET_BATCHING_H_
#define QUADVO_DATASET_BATCHING_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace quadvo::dataset {

using Batch = std::vector<std::size_t>;  // sample indices

/// Seeded Fisher-Yates shuffle of 0..count-1 cut into batches of
/// `batch_size`; the last batch keeps the remainder. Throws
/// std::invalid_argument for batch_size 0.
std::vector<Batch> make_batches(std::size_t count, std::size_t batch_size,
                                std::uint64_t seed);

}  // namespace quadvo::dataset

#endif  // QUADVO_DATASET_BATCHING_H_
