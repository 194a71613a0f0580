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

#include "quadvo/dataset/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace quadvo::dataset {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double lattice(std::uint64_t seed, int octave, std::int64_t ix, std::int64_t iz) {
  std::uint64_t h = mix(seed ^ (static_cast<std::uint64_t>(octave) << 56));
  h = mix(h ^ static_cast<std::uint64_t>(ix));
  h = mix(h ^ static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Camera ray (dx, dy, 1) expressed in the level heading frame (x right,
// y down, z forward) of a camera pitched down by spec.pitch.
void level_ray(const SceneSpec& spec, double dx, double dy, double& hx, double& hy,
               double& hz) {
  const double c = std::cos(spec.pitch), s = std::sin(spec.pitch);
  hx = dx;
  hy = c * dy + s;
  hz = -s * dy + c;
}

// Ground point seen along camera ray (dx, dy, 1) from `state`; false for
// rays above the horizon or beyond the sky distance.
bool ground_hit(const SceneSpec& spec, const CameraState& state, double dx, double dy,
                double& gx, double& gz) {
  double hx, hy, hz;
  level_ray(spec, dx, dy, hx, hy, hz);
  if (hy <= 0.0) return false;
  const double t = spec.camera_height / hy;
  const double fx = t * hx, fz = t * hz;
  if (fz > spec.sky_distance) return false;
  const double c = std::cos(state.psi), s = std::sin(state.psi);
  gx = state.x + c * fx + s * fz;
  gz = state.z - s * fx + c * fz;
  return true;
}

// Pixel of world ground point (gx, gz) in the camera at `state`; false if
// it lies behind the camera.
bool project(const SceneSpec& spec, const CameraState& state, double gx, double gz,
             double& px, double& py) {
  const double rx = gx - state.x, rz = gz - state.z;
  const double c = std::cos(state.psi), s = std::sin(state.psi);
  const double hx = c * rx - s * rz;
  const double hz = s * rx + c * rz;
  const double cp = std::cos(spec.pitch), sp = std::sin(spec.pitch);
  const double cam_y = cp * spec.camera_height - sp * hz;
  const double cam_z = sp * spec.camera_height + cp * hz;
  if (cam_z <= 1e-9) return false;
  px = spec.cx() + spec.focal * hx / cam_z;
  py = spec.cy() + spec.focal * cam_y / cam_z;
  return true;
}

bool inside(const SceneSpec& spec, double px, double py) {
  return px >= 0.0 && py >= 0.0 && px <= spec.width - 1 && py <= spec.height - 1;
}

}  // namespace

void SceneSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("scene spec: " + what);
  };
  if (width < 2 || height < 2) fail("image must be at least 2x2");
  if (!(focal > 0.0)) fail("focal length must be positive");
  if (!(camera_height > 0.0)) fail("camera height must be positive");
  if (octaves < 1) fail("octaves must be >= 1");
  if (!(cell > 0.0)) fail("cell size must be positive");
  if (!(sky_distance > 0.0)) fail("sky distance must be positive");
  if (!(sky_value >= 0.0 && sky_value <= 1.0)) fail("sky value must lie in [0, 1]");
  if (supersample < 1) fail("supersample must be >= 1");
  if (!(pitch >= 0.0 && pitch < 1.5)) fail("pitch must lie in [0, 1.5) rad");
}

CameraState advance(const CameraState& state, const PoseIncrement& inc) {
  CameraState out;
  out.psi = state.psi + inc.dphi;
  out.x = state.x + inc.dp * std::sin(out.psi);
  out.z = state.z + inc.dp * std::cos(out.psi);
  return out;
}

double ground_texture(const SceneSpec& spec, double x, double z) {
  double total = 0.0, norm = 0.0, amp = 1.0, freq = 1.0 / spec.cell;
  for (int o = 0; o < spec.octaves; ++o) {
    const double fx = x * freq, fz = z * freq;
    const double x0 = std::floor(fx), z0 = std::floor(fz);
    const auto ix = static_cast<std::int64_t>(x0);
    const auto iz = static_cast<std::int64_t>(z0);
    const double tx = fade(fx - x0), tz = fade(fz - z0);
    const double a = lattice(spec.seed, o, ix, iz);
    const double b = lattice(spec.seed, o, ix + 1, iz);
    const double c = lattice(spec.seed, o, ix, iz + 1);
    const double d = lattice(spec.seed, o, ix + 1, iz + 1);
    const double top = a + tx * (b - a);
    const double bot = c + tx * (d - c);
    total += amp * (top + tz * (bot - top));
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return 0.05 + 0.9 * (total / norm);
}

GrayImage render_view(const SceneSpec& spec, const CameraState& state) {
  spec.validate();
  GrayImage img(spec.width, spec.height);
  const int n = spec.supersample;
  const double inv = 1.0 / (n * n);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double acc = 0.0;
      for (int sy = 0; sy < n; ++sy) {
        for (int sx = 0; sx < n; ++sx) {
          const double px = x + (sx + 0.5) / n - 0.5;
          const double py = y + (sy + 0.5) / n - 0.5;
          double gx, gz;
          if (ground_hit(spec, state, (px - spec.cx()) / spec.focal,
                         (py - spec.cy()) / spec.focal, gx, gz)) {
            acc += ground_texture(spec, gx, gz);
          } else {
            acc += spec.sky_value;
          }
        }
      }
      img(x, y) = std::clamp(acc * inv, 0.0, 1.0);
    }
  }
  return img;
}

Sample render_pair(const SceneSpec& spec, const PoseIncrement& inc) {
  spec.validate();
  const CameraState origin;
  const CameraState moved = advance(origin, inc);
  Sample s;
  s.prev = render_view(spec, origin);
  s.gt = inc;
  GrayImage next(spec.width, spec.height, spec.sky_value);
  std::size_t ground = 0, lost = 0;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double gx, gz, px, py;
      if (!ground_hit(spec, moved, (x - spec.cx()) / spec.focal,
                      (y - spec.cy()) / spec.focal, gx, gz)) {
        continue;
      }
      ++ground;
      if (!project(spec, origin, gx, gz, px, py)) {
        ++lost;
        continue;
      }
      if (!inside(spec, px, py)) ++lost;
      next(x, y) = s.prev.sample(px, py);
    }
  }
  if (ground > 0 && static_cast<double>(lost) > 0.3 * static_cast<double>(ground)) {
    throw std::invalid_argument(
        "render_pair: motion (dp " + std::to_string(inc.dp) + ", dphi " +
        std::to_string(inc.dphi) + ") moves " + std::to_string(lost) + " of " +
        std::to_string(ground) + " ground pixels out of the frame");
  }
  s.next = std::move(next);
  return s;
}

std::vector<GrayImage> render_sequence(const SceneSpec& spec,
                                       std::span<const PoseIncrement> increments) {
  std::vector<GrayImage> frames;
  frames.reserve(increments.size() + 1);
  CameraState state;
  frames.push_back(render_view(spec, state));
  for (const PoseIncrement& inc : increments) {
    state = advance(state, inc);
    frames.push_back(render_view(spec, state));
  }
  return frames;
}

AnalyticFlow analytic_flow(const SceneSpec& spec, const PoseIncrement& inc) {
  spec.validate();
  const CameraState origin;
  const CameraState moved = advance(origin, inc);
  AnalyticFlow out{FlowField(spec.width, spec.height),
                   std::vector<std::uint8_t>(
                       static_cast<std::size_t>(spec.width) * spec.height, 0)};
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double gx, gz, px, py;
      if (!ground_hit(spec, origin, (x - spec.cx()) / spec.focal,
                      (y - spec.cy()) / spec.focal, gx, gz)) {
        continue;
      }
      if (!project(spec, moved, gx, gz, px, py)) continue;
      out.field.u(x, y) = px - x;
      out.field.v(x, y) = py - y;
      double hx, hz;
      const bool ground_next = ground_hit(spec, moved, (px - spec.cx()) / spec.focal,
                                          (py - spec.cy()) / spec.focal, hx, hz);
      if (ground_next && inside(spec, px, py)) {
        out.valid[static_cast<std::size_t>(y) * spec.width + x] = 1;
      }
    }
  }
  return out;
}

std::vector<PoseIncrement> synth_increments(std::uint64_t seed, std::size_t n,
                                            Range dp, Range dphi) {
  if (!(dp.lo >= 0.0 && dp.lo <= dp.hi && dp.hi <= 3.0)) {
    throw std::invalid_argument("synth_increments: dp range must satisfy 0 <= lo <= hi <= 3");
  }
  if (!(dphi.lo >= -0.2 && dphi.lo <= dphi.hi && dphi.hi <= 0.2)) {
    throw std::invalid_argument(
        "synth_increments: dphi range must satisfy -0.2 <= lo <= hi <= 0.2");
  }
  std::vector<PoseIncrement> out;
  out.reserve(n);
  if (n == 0) return out;
  std::mt19937_64 rng(seed);
  const double dp_step = 0.05 * (dp.hi - dp.lo);
  const double dphi_step = 0.015;
  PoseIncrement cur{dp.lo + unit(rng) * (dp.hi - dp.lo),
                    dphi.lo + unit(rng) * (dphi.hi - dphi.lo)};
  out.push_back(cur);
  for (std::size_t i = 1; i < n; ++i) {
    cur.dp = std::clamp(cur.dp + (2.0 * unit(rng) - 1.0) * dp_step, dp.lo, dp.hi);
    cur.dphi = std::clamp(cur.dphi + (2.0 * unit(rng) - 1.0) * dphi_step, dphi.lo, dphi.hi);
    out.push_back(cur);
  }
  return out;
}

}  // namespace quadvo::dataset
