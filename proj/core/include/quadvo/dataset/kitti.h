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

#ifndef QUADVO_DATASET_KITTI_H_
#define QUADVO_DATASET_KITTI_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "quadvo/dataset/synth.h"
#include "quadvo/flow/image.h"
#include "quadvo/geometry/pose.h"

namespace quadvo::dataset {

struct KittiOptions {
  int width = 1226;   // unified size; larger frames are center-cropped
  int height = 370;
  int stride = 1;     // keep every stride-th frame
  /// Pose file; empty means <dir>/poses.txt when that file exists.
  std::filesystem::path poses;
  bool use_poses = true;  // false ignores any pose file
};

struct SequenceManifest {
  std::filesystem::path root;
  std::vector<std::filesystem::path> images;  // after stride
  std::optional<std::filesystem::path> poses;
  int width = 0;  // unified frame size
  int height = 0;
};

/// A scanned sequence: image paths plus per-frame GT poses when present.
struct KittiSequence {
  SequenceManifest manifest;
  std::vector<geometry::PoseMatrix> poses;  // empty or one per image

  std::size_t frame_count() const { return manifest.images.size(); }
  bool has_ground_truth() const { return !poses.empty(); }

  /// Frame i as a grayscale image of the unified size.
  flow::GrayImage frame(std::size_t i) const;
  /// Increment between frames i and i + 1 (requires ground truth).
  geometry::PoseIncrement increment(std::size_t i) const;
};

/// Scans <dir>/image_2 (or <dir> itself when it has no image_2) for PNG
/// files in name order. Throws std::invalid_argument with the cause for
/// missing directories, fewer than 2 images, or a pose count that differs
/// from the image count.
KittiSequence load_kitti(const std::filesystem::path& dir, const KittiOptions& options = {});

/// Center crop to width x height. Throws std::invalid_argument if the image
/// is smaller in either dimension.
flow::GrayImage center_crop(const flow::GrayImage& image, int width, int height);

/// All consecutive pairs of the sequence (gt left zero when absent).
std::vector<Sample> load_samples(const KittiSequence& sequence);

}  // namespace quadvo::dataset

#endif  // QUADVO_DATASET_KITTI_H_
