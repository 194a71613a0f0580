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

#include "quadvo/dataset/kitti.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "quadvo/dataset/png_io.h"
#include "quadvo/geometry/kitti_io.h"

namespace quadvo::dataset {

namespace fs = std::filesystem;

flow::GrayImage center_crop(const flow::GrayImage& image, int width, int height) {
  if (image.width() < width || image.height() < height) {
    throw std::invalid_argument(
        "center_crop: image " + std::to_string(image.width()) + "x" +
        std::to_string(image.height()) + " is smaller than the unified size " +
        std::to_string(width) + "x" + std::to_string(height));
  }
  if (image.width() == width && image.height() == height) return image;
  const int ox = (image.width() - width) / 2;
  const int oy = (image.height() - height) / 2;
  flow::GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = image(ox + x, oy + y);
  }
  return out;
}

KittiSequence load_kitti(const fs::path& dir, const KittiOptions& options) {
  if (options.stride < 1) throw std::invalid_argument("load_kitti: stride must be >= 1");
  if (options.width < 1 || options.height < 1) {
    throw std::invalid_argument("load_kitti: unified size must be positive");
  }
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("load_kitti: " + dir.string() + " is not a directory");
  }
  const fs::path image_dir = fs::is_directory(dir / "image_2") ? dir / "image_2" : dir;
  std::vector<fs::path> all;
  for (const fs::directory_entry& e : fs::directory_iterator(image_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") all.push_back(e.path());
  }
  std::sort(all.begin(), all.end());

  KittiSequence seq;
  seq.manifest.root = dir;
  seq.manifest.width = options.width;
  seq.manifest.height = options.height;
  for (std::size_t i = 0; i < all.size(); i += static_cast<std::size_t>(options.stride)) {
    seq.manifest.images.push_back(all[i]);
  }
  if (seq.manifest.images.size() < 2) {
    throw std::invalid_argument("load_kitti: " + image_dir.string() + " holds " +
                                std::to_string(seq.manifest.images.size()) +
                                " usable images, need at least 2");
  }

  fs::path pose_path = options.use_poses ? options.poses : fs::path();
  if (options.use_poses && pose_path.empty() && fs::is_regular_file(dir / "poses.txt")) pose_path = dir / "poses.txt";
  if (!pose_path.empty()) {
    const std::vector<geometry::PoseMatrix> poses = geometry::read_kitti_poses(pose_path);
    if (poses.size() != all.size()) {
      throw std::invalid_argument("load_kitti: pose count mismatch: " +
                                  pose_path.string() + " has " +
                                  std::to_string(poses.size()) + " poses for " +
                                  std::to_string(all.size()) + " images");
    }
    for (std::size_t i = 0; i < poses.size(); i += static_cast<std::size_t>(options.stride)) {
      seq.poses.push_back(poses[i]);
    }
    seq.manifest.poses = pose_path;
  }
  return seq;
}

flow::GrayImage KittiSequence::frame(std::size_t i) const {
  return center_crop(read_png(manifest.images.at(i)), manifest.width, manifest.height);
}

geometry::PoseIncrement KittiSequence::increment(std::size_t i) const {
  if (!has_ground_truth()) {
    throw std::logic_error("KittiSequence::increment: sequence has no poses");
  }
  return geometry::decompose(poses.at(i), poses.at(i + 1));
}

std::vector<Sample> load_samples(const KittiSequence& sequence) {
  std::vector<Sample> out;
  flow::GrayImage prev = sequence.frame(0);
  for (std::size_t i = 0; i + 1 < sequence.frame_count(); ++i) {
    Sample s;
    s.prev = prev;
    s.next = sequence.frame(i + 1);
    if (sequence.has_ground_truth()) s.gt = sequence.increment(i);
    prev = s.next;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace quadvo::dataset
