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

#include "quadvo/geometry/kitti_io.h"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace quadvo::geometry {

std::vector<PoseMatrix> parse_kitti_poses(std::istream& in,
                                          const std::string& source) {
  std::vector<PoseMatrix> poses;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::array<double, 12> values{};
    std::size_t count = 0;
    std::string token;
    while (tokens >> token) {
      double v = 0.0;
      const char* first = token.data();
      const char* last = token.data() + token.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw FormatError(source + ":" + std::to_string(line_no) +
                          ": non-numeric token '" + token + "'");
      }
      if (count < values.size()) values[count] = v;
      ++count;
    }
    if (count == 0) continue;
    if (count != 12) {
      throw FormatError(source + ":" + std::to_string(line_no) +
                        ": expected 12 values, got " + std::to_string(count));
    }
    poses.push_back(PoseMatrix::from_row_major(values));
  }
  return poses;
}

std::vector<PoseMatrix> read_kitti_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pose file " + path.string());
  return parse_kitti_poses(in, path.string());
}

void format_kitti_poses(std::ostream& out, const std::vector<PoseMatrix>& poses) {
  char buf[40];
  for (const PoseMatrix& p : poses) {
    const auto v = p.row_major();
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      if (i > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_kitti_poses(const std::vector<PoseMatrix>& poses,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  format_kitti_poses(out, poses);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace quadvo::geometry
