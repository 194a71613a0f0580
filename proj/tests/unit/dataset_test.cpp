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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include <Eigen/Dense>

#include "oracles.h"
#include "quadvo/dataset/batching.h"
#include "quadvo/dataset/kitti.h"
#include "quadvo/dataset/png_io.h"
#include "quadvo/dataset/synth.h"
#include "quadvo/flow/lucas_kanade.h"
#include "quadvo/geometry/kitti_io.h"

namespace {

using namespace quadvo::dataset;
using quadvo::flow::GrayImage;
using quadvo::geometry::PoseIncrement;
using quadvo::geometry::PoseMatrix;

const Range kDeskDp{0.05, 0.2};
const Range kDeskDphi{-0.025, 0.025};

SceneSpec small_scene(std::uint64_t seed = 1) {
  SceneSpec s;
  s.seed = seed;
  s.supersample = 1;
  return s;
}

TEST(SynthIncrements, Empty) {
  EXPECT_TRUE(synth_increments(1, 0, kDeskDp, kDeskDphi).empty());
}

TEST(SynthIncrements, SeedDeterminism) {
  const auto a = synth_increments(7, 50, kDeskDp, kDeskDphi);
  const auto b = synth_increments(7, 50, kDeskDp, kDeskDphi);
  const auto c = synth_increments(8, 50, kDeskDp, kDeskDphi);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SynthIncrements, StaysInRange) {
  const auto incs = synth_increments(3, 10000, {0.2, 1.5}, {-0.1, 0.08});
  ASSERT_EQ(incs.size(), 10000u);
  const auto [dp_lo, dp_hi] = std::minmax_element(
      incs.begin(), incs.end(), [](auto& a, auto& b) { return a.dp < b.dp; });
  const auto [ph_lo, ph_hi] = std::minmax_element(
      incs.begin(), incs.end(), [](auto& a, auto& b) { return a.dphi < b.dphi; });
  EXPECT_GE(dp_lo->dp, 0.2);
  EXPECT_LE(dp_hi->dp, 1.5);
  EXPECT_GE(ph_lo->dphi, -0.1);
  EXPECT_LE(ph_hi->dphi, 0.08);
}

TEST(SynthIncrements, RejectsBadRanges) {
  EXPECT_THROW(synth_increments(1, 5, {-0.1, 1.0}, {0, 0}), std::invalid_argument);
  EXPECT_THROW(synth_increments(1, 5, {1.0, 0.5}, {0, 0}), std::invalid_argument);
  EXPECT_THROW(synth_increments(1, 5, {0, 1}, {-0.5, 0}), std::invalid_argument);
}

TEST(SceneSpec, Validation) {
  SceneSpec s;
  s.focal = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.camera_height = -1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.pitch = -0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  EXPECT_NO_THROW(s.validate());
}

TEST(RenderPair, NoMotionGivesIdenticalFrames) {
  const Sample s = render_pair(small_scene(), {0.0, 0.0});
  double worst = 0.0;
  for (int y = 0; y < s.prev.height(); ++y) {
    for (int x = 0; x < s.prev.width(); ++x) {
      worst = std::max(worst, std::abs(s.prev(x, y) - s.next(x, y)));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(RenderPair, GroundTruthIsTheIncrement) {
  const Sample s = render_pair(small_scene(), {0.7, -0.03});
  EXPECT_EQ(s.gt, (quadvo::geometry::PoseIncrement{0.7, -0.03}));
  EXPECT_FALSE(s.flow.has_value());
}

// Ground-plane homography taking prev pixels to next pixels: level frame
// tilted by the pitch, yaw by dphi, then dp along the new heading.
Eigen::Matrix3d ground_homography(const SceneSpec& spec, double dp, double dphi) {
  Eigen::Matrix3d k;
  k << spec.focal, 0.0, spec.cx(), 0.0, spec.focal, spec.cy(), 0.0, 0.0, 1.0;
  const double cp = std::cos(spec.pitch), sp = std::sin(spec.pitch);
  Eigen::Matrix3d tilt;
  tilt << 1.0, 0.0, 0.0, 0.0, cp, -sp, 0.0, sp, cp;
  const double c = std::cos(dphi), s = std::sin(dphi);
  Eigen::Matrix3d yaw;
  yaw << c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c;
  const Eigen::Vector3d t(dp * s, 0.0, dp * c);
  const Eigen::Vector3d n(0.0, 1.0 / spec.camera_height, 0.0);
  return k * tilt * yaw * (Eigen::Matrix3d::Identity() - t * n.transpose()) *
         tilt.transpose() * k.inverse();
}

Eigen::Vector2d apply(const Eigen::Matrix3d& h, double x, double y) {
  const Eigen::Vector3d p = h * Eigen::Vector3d(x, y, 1.0);
  return {p.x() / p.z(), p.y() / p.z()};
}

// True if pixel (x, y) sees the ground closer than the sky distance.
bool sees_ground(const SceneSpec& spec, double x, double y) {
  const double dy = (y - spec.cy()) / spec.focal;
  const double down = std::cos(spec.pitch) * dy + std::sin(spec.pitch);
  const double ahead = -std::sin(spec.pitch) * dy + std::cos(spec.pitch);
  return down > 0.0 && ahead * spec.camera_height / down <= spec.sky_distance;
}

// Checks analytic_flow against the homography and that every ground pixel of
// next is prev sampled at the homography source. Returns pixels checked.
std::size_t check_against_homography(const SceneSpec& spec, PoseIncrement inc) {
  const Eigen::Matrix3d h = ground_homography(spec, inc.dp, inc.dphi);
  const Eigen::Matrix3d h_inv = h.inverse();
  const AnalyticFlow af = analytic_flow(spec, inc);
  const Sample s = render_pair(spec, inc);
  std::size_t checked = 0;
  double worst = 0.0, worst_intensity = 0.0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (af.valid[static_cast<std::size_t>(y) * spec.width + x]) {
        const Eigen::Vector2d e = apply(h, x, y);
        worst = std::max(worst, std::hypot(af.field.u(x, y) - (e.x() - x),
                                           af.field.v(x, y) - (e.y() - y)));
        ++checked;
      }
      if (sees_ground(spec, x, y)) {
        const Eigen::Vector2d src = apply(h_inv, x, y);
        worst_intensity = std::max(worst_intensity,
                                   std::abs(s.next(x, y) - s.prev.sample(src.x(), src.y())));
      }
    }
  }
  EXPECT_LT(worst, 0.1);
  EXPECT_LT(worst_intensity, 1e-9);
  return checked;
}

TEST(RenderPair, ForwardMotionMatchesHomography) {
  SceneSpec spec = small_scene();
  spec.focal = 200.0;
  spec.camera_height = 1.5;
  spec.pitch = 0.0;
  EXPECT_GT(check_against_homography(spec, {1.0, 0.0}), 1000u);
  const AnalyticFlow af = analytic_flow(spec, {1.0, 0.0});
  double worst = 0.0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (!af.valid[static_cast<std::size_t>(y) * spec.width + x]) continue;
      // Ground depth Z = f h / (y - cy); after moving 1 m the same point
      // projects with depth Z - 1.
      const double z = spec.focal * spec.camera_height / (y - spec.cy());
      const double k = z / (z - 1.0);
      const double ex = spec.cx() + (x - spec.cx()) * k;
      const double ey = spec.cy() + (y - spec.cy()) * k;
      worst = std::max(worst, std::hypot(af.field.u(x, y) - (ex - x), af.field.v(x, y) - (ey - y)));
      // Outward from the focus of expansion at the principal point.
      EXPECT_GE(af.field.v(x, y), 0.0);
      if (x > spec.cx()) EXPECT_GE(af.field.u(x, y), 0.0);
      if (x < spec.cx()) EXPECT_LE(af.field.u(x, y), 0.0);
    }
  }
  EXPECT_LT(worst, 0.1);
}

TEST(RenderPair, PitchedCameraMatchesHomography) {
  const SceneSpec spec = small_scene();
  for (const PoseIncrement inc :
       {PoseIncrement{0.2, 0.0}, {0.15, 0.025}, {0.05, -0.02}, {0.0, 0.01}}) {
    EXPECT_GT(check_against_homography(spec, inc), 10000u);
  }
  // The focus of expansion lies above the image, so forward motion pushes
  // every ground pixel down and away from the centre column.
  const AnalyticFlow af = analytic_flow(spec, {0.2, 0.0});
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (!af.valid[static_cast<std::size_t>(y) * spec.width + x]) continue;
      EXPECT_GT(af.field.v(x, y), 0.0);
      if (x > spec.cx()) EXPECT_GT(af.field.u(x, y), 0.0);
      if (x < spec.cx()) EXPECT_LT(af.field.u(x, y), 0.0);
    }
  }
}

TEST(RenderPair, SeedsChangeTexture) {
  const GrayImage a = render_view(small_scene(1), {});
  const GrayImage b = render_view(small_scene(2), {});
  double worst = 0.0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    worst = std::max(worst, std::abs(a.pixels()[i] - b.pixels()[i]));
  }
  EXPECT_GT(worst, 0.1);
}

TEST(RenderPair, RejectsMotionLeavingTheFrame) {
  SceneSpec spec = small_scene();
  spec.focal = 1000.0;
  EXPECT_THROW(render_pair(spec, {0.5, 0.2}), std::invalid_argument);
  EXPECT_NO_THROW(render_pair(spec, {0.05, 0.01}));
}

TEST(RenderPair, LucasKanadeAgreesWithAnalyticFlow) {
  SceneSpec spec;
  spec.seed = 5;
  std::vector<PoseIncrement> incs = {{0.2, 0.0}, {0.2, 0.025}, {0.2, -0.025}, {0.05, 0.025}};
  for (const PoseIncrement& inc : synth_increments(3, 4, kDeskDp, kDeskDphi)) incs.push_back(inc);
  for (const PoseIncrement& inc : incs) {
    const Sample s = render_pair(spec, inc);
    const AnalyticFlow af = analytic_flow(spec, inc);
    const auto lk = quadvo::flow::lk_flow(s.prev, s.next);
    const int margin = 16;
    double total = 0.0;
    std::size_t n = 0;
    for (int y = margin; y < spec.height - margin; ++y) {
      for (int x = margin; x < spec.width - margin; ++x) {
        if (!af.valid[static_cast<std::size_t>(y) * spec.width + x]) continue;
        total += std::hypot(lk.u(x, y) - af.field.u(x, y), lk.v(x, y) - af.field.v(x, y));
        ++n;
      }
    }
    ASSERT_GT(n, 500u);
    EXPECT_LT(total / n, 0.5) << "dp " << inc.dp << " dphi " << inc.dphi;
  }
}

TEST(RenderSequence, FrameCount) {
  const auto incs = synth_increments(1, 3, kDeskDp, kDeskDphi);
  EXPECT_EQ(render_sequence(small_scene(), incs).size(), 4u);
}

TEST(Png, RoundTripIsEightBitQuantized) {
  GrayImage img(13, 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 13; ++x) img(x, y) = quadvo::testing::smooth_texture(3, x, y);
  }
  const auto dir = quadvo::testing::scratch_dir("png");
  write_png(dir / "a.png", img);
  const GrayImage back = read_png(dir / "a.png");
  ASSERT_EQ(back.width(), 13);
  ASSERT_EQ(back.height(), 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 13; ++x) {
      EXPECT_NEAR(back(x, y), std::lround(img(x, y) * 255.0) / 255.0, 1e-12);
    }
  }
}

TEST(Png, RejectsGarbage) {
  const auto dir = quadvo::testing::scratch_dir("png_bad");
  std::ofstream(dir / "bad.png") << "not a png";
  EXPECT_THROW(read_png(dir / "bad.png"), quadvo::FormatError);
}

TEST(CenterCrop, CropsAroundCentreAndRejectsSmaller) {
  GrayImage img(6, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) img(x, y) = (10 * y + x) / 100.0;
  }
  const GrayImage c = center_crop(img, 4, 2);
  EXPECT_EQ(c(0, 0), img(1, 1));
  EXPECT_EQ(c(3, 1), img(4, 2));
  EXPECT_THROW(center_crop(img, 8, 4), std::invalid_argument);
}

class KittiDir : public ::testing::Test {
 protected:
  void make(int images, int pose_lines) {
    dir_ = quadvo::testing::scratch_dir("kitti_" + std::to_string(images) + "_" +
                                        std::to_string(pose_lines));
    std::filesystem::create_directories(dir_ / "image_2");
    for (int i = 0; i < images; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%06d.png", i);
      write_png(dir_ / "image_2" / name, render_view(scene_, {0.0, 0.0, 0.5 * i}));
    }
    std::vector<PoseMatrix> poses(static_cast<std::size_t>(pose_lines));
    quadvo::geometry::write_kitti_poses(poses, dir_ / "poses.txt");
  }
  KittiOptions options() const { return {scene_.width, scene_.height, 1, {}, true}; }

  SceneSpec scene_ = [] {
    SceneSpec s = small_scene();
    s.width = 40;
    s.height = 20;
    return s;
  }();
  std::filesystem::path dir_;
};

TEST_F(KittiDir, TwoImagesGiveOneSample) {
  make(2, 2);
  const KittiSequence seq = load_kitti(dir_, options());
  EXPECT_EQ(seq.frame_count(), 2u);
  EXPECT_TRUE(seq.has_ground_truth());
  const auto samples = load_samples(seq);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].gt, (quadvo::geometry::PoseIncrement{0.0, 0.0}));
}

TEST_F(KittiDir, PoseCountMismatch) {
  make(2, 3);
  try {
    load_kitti(dir_, options());
    FAIL() << "expected a count mismatch";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("count mismatch"), std::string::npos) << e.what();
  }
}

TEST_F(KittiDir, NeedsTwoImages) {
  make(1, 1);
  EXPECT_THROW(load_kitti(dir_, options()), std::invalid_argument);
}

TEST_F(KittiDir, StrideSkipsFrames) {
  make(5, 5);
  KittiOptions opts = options();
  opts.stride = 2;
  const KittiSequence seq = load_kitti(dir_, opts);
  EXPECT_EQ(seq.frame_count(), 3u);
  EXPECT_EQ(seq.poses.size(), 3u);
}

TEST_F(KittiDir, LoadingIsDeterministic) {
  make(3, 3);
  const auto a = load_samples(load_kitti(dir_, options()));
  const auto b = load_samples(load_kitti(dir_, options()));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].prev, b[i].prev);
    EXPECT_EQ(a[i].next, b[i].next);
    EXPECT_EQ(a[i].gt, b[i].gt);
  }
}

TEST_F(KittiDir, RejectsFramesSmallerThanUnifiedSize) {
  make(2, 2);
  KittiOptions opts = options();
  opts.width = 80;
  EXPECT_THROW(load_samples(load_kitti(dir_, opts)), std::invalid_argument);
}

TEST(Batching, SizesAndDeterminism) {
  const auto a = make_batches(10, 4, 1);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].size(), 4u);
  EXPECT_EQ(a[1].size(), 4u);
  EXPECT_EQ(a[2].size(), 2u);
  EXPECT_EQ(make_batches(10, 4, 1), a);
  EXPECT_NE(make_batches(10, 4, 2), a);
}

TEST(Batching, IsAPermutation) {
  const auto batches = make_batches(103, 8, 5);
  std::vector<std::size_t> all;
  for (const Batch& b : batches) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  ASSERT_EQ(all.size(), 103u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(Batching, RejectsZeroBatch) { EXPECT_THROW(make_batches(3, 0, 1), std::invalid_argument); }

}  // namespace
