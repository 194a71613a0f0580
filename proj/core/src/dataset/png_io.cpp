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

#include "quadvo/dataset/png_io.h"

#include <png.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "quadvo/errors.h"

namespace quadvo::dataset {

flow::GrayImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw FormatError(path.string() + ": cannot read PNG (" + image.message + ")");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": cannot decode PNG (" + msg + ")");
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<double> pixels(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const png_byte* p = &buffer[3 * i];
    const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    pixels[i] = std::min(1.0, luma / 255.0);
  }
  return flow::GrayImage(w, h, std::move(pixels));
}

void write_png(const std::filesystem::path& path, const flow::GrayImage& image) {
  png_image out;
  std::memset(&out, 0, sizeof(out));
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(image.width());
  out.height = static_cast<png_uint_32>(image.height());
  out.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(image.pixels().size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    buffer[i] = static_cast<png_byte>(std::lround(image.pixels()[i] * 255.0));
  }
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, buffer.data(), 0,
                               nullptr)) {
    throw FormatError(path.string() + ": cannot write PNG (" + out.message + ")");
  }
}

}  // namespace quadvo::dataset
