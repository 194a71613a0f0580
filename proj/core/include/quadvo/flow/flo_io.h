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

#ifndef QUADVO_FLOW_FLO_IO_H_
#define QUADVO_FLOW_FLO_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "quadvo/errors.h"
#include "quadvo/flow/image.h"

namespace quadvo::flow {

using quadvo::FormatError;

/// Middlebury .flo magic, stored as a little-endian float32.
inline constexpr float kFloMagic = 202021.25f;

/// Layout: float32 magic, int32 width, int32 height, then height*width
/// interleaved (u, v) float32 pairs in row-major order; all little-endian.
std::vector<std::uint8_t> encode_flo(const FlowField& field);
FlowField decode_flo(const std::vector<std::uint8_t>& bytes);

void write_flo(const FlowField& field, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

}  // namespace quadvo::flow

#endif  // QUADVO_FLOW_FLO_IO_H_
