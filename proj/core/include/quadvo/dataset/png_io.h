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

#ifndef QUADVO_DATASET_PNG_IO_H_
#define QUADVO_DATASET_PNG_IO_H_

#include <filesystem>

#include "quadvo/flow/image.h"

namespace quadvo::dataset {

/// Reads a PNG as grayscale in [0, 1]. Colour images are converted with
/// luma = 0.299 R + 0.587 G + 0.114 B. Throws quadvo::FormatError.
flow::GrayImage read_png(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG (intensities rounded to k/255).
void write_png(const std::filesystem::path& path, const flow::GrayImage& image);

}  // namespace quadvo::dataset

#endif  // QUADVO_DATASET_PNG_IO_H_
