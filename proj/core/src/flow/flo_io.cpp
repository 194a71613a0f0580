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

#include "quadvo/flow/flo_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace quadvo::flow {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
  put_u32(out, std::bit_cast<std::uint32_t>(f));
}

float get_f32(const std::vector<std::uint8_t>& in, std::size_t offset) {
  return std::bit_cast<float>(get_u32(in, offset));
}

}  // namespace

std::vector<std::uint8_t> encode_flo(const FlowField& field) {
  if (!field.all_finite()) throw std::invalid_argument("write_flo: non-finite flow");
  if (field.width() <= 0 || field.height() <= 0) {
    throw std::invalid_argument("write_flo: empty flow field");
  }
  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 * static_cast<std::size_t>(field.width()) * field.height());
  put_f32(out, kFloMagic);
  put_u32(out, static_cast<std::uint32_t>(field.width()));
  put_u32(out, static_cast<std::uint32_t>(field.height()));
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      put_f32(out, static_cast<float>(field.u(x, y)));
      put_f32(out, static_cast<float>(field.v(x, y)));
    }
  }
  return out;
}

FlowField decode_flo(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12) {
    throw FormatError("flo: truncated header (" + std::to_string(bytes.size()) +
                      " bytes)");
  }
  const float magic = get_f32(bytes, 0);
  if (magic != kFloMagic) {
    throw FormatError("flo: bad magic number " + std::to_string(magic));
  }
  const auto width = static_cast<std::int32_t>(get_u32(bytes, 4));
  const auto height = static_cast<std::int32_t>(get_u32(bytes, 8));
  if (width <= 0 || height <= 0) {
    throw FormatError("flo: non-positive dimensions " + std::to_string(width) +
                      "x" + std::to_string(height));
  }
  const std::size_t expected =
      12 + 8 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < expected) {
    throw FormatError("flo: truncated payload, expected " +
                      std::to_string(expected) + " bytes, got " +
                      std::to_string(bytes.size()));
  }
  FlowField field(width, height);
  std::size_t off = 12;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      field.u(x, y) = get_f32(bytes, off);
      field.v(x, y) = get_f32(bytes, off + 4);
      off += 8;
    }
  }
  return field;
}

void write_flo(const FlowField& field, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_flo(field);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_flo(bytes);
}

}  // namespace quadvo::flow
