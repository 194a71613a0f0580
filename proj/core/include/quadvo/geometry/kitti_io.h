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

#ifndef QUADVO_GEOMETRY_KITTI_IO_H_
#define QUADVO_GEOMETRY_KITTI_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "quadvo/errors.h"
#include "quadvo/geometry/pose.h"

namespace quadvo::geometry {

/// KITTI pose text: one pose per line, 12 space-separated row-major values
/// of [R|T]. Blank lines are skipped. Malformed lines raise FormatError
/// naming `source` and the 1-based line number.
std::vector<PoseMatrix> parse_kitti_poses(std::istream& in,
                                          const std::string& source = "<stream>");
std::vector<PoseMatrix> read_kitti_poses(const std::filesystem::path& path);

/// Emits 17 significant digits so that values survive a read back exactly.
void format_kitti_poses(std::ostream& out, const std::vector<PoseMatrix>& poses);
void write_kitti_poses(const std::vector<PoseMatrix>& poses,
                       const std::filesystem::path& path);

}  // namespace quadvo::geometry

#endif  // QUADVO_GEOMETRY_KITTI_IO_H_
