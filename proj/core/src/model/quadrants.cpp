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

#include "quadvo/model/quadrants.h"

#include <stdexcept>
#include <string>

namespace quadvo::model {

QuadrantSet split_quadrants(const FlowField& field) {
  if (field.width() < 2 || field.height() < 2) {
    throw std::invalid_argument("split_quadrants: field " +
                                std::to_string(field.width()) + "x" +
                                std::to_string(field.height()) +
                                " is too small to split");
  }
  const int qw = field.width() / 2;
  const int qh = field.height() / 2;
  QuadrantSet set;
  for (int q = 0; q < 4; ++q) {
    const int ox = (q % 2) * qw;
    const int oy = (q / 2) * qh;
    FlowField part(qw, qh);
    for (int y = 0; y < qh; ++y) {
      for (int x = 0; x < qw; ++x) {
        part.u(x, y) = field.u(ox + x, oy + y);
        part.v(x, y) = field.v(ox + x, oy + y);
      }
    }
    set.quads[q] = std::move(part);
  }
  return set;
}

FlowField reassemble(const QuadrantSet& set) {
  const int qw = set.width();
  const int qh = set.height();
  for (const FlowField& q : set.quads) {
    if (q.width() != qw || q.height() != qh) {
      throw std::invalid_argument("reassemble: quadrants differ in size");
    }
  }
  FlowField out(2 * qw, 2 * qh);
  for (int q = 0; q < 4; ++q) {
    const int ox = (q % 2) * qw;
    const int oy = (q / 2) * qh;
    for (int y = 0; y < qh; ++y) {
      for (int x = 0; x < qw; ++x) {
        out.u(ox + x, oy + y) = set.quads[q].u(x, y);
        out.v(ox + x, oy + y) = set.quads[q].v(x, y);
      }
    }
  }
  return out;
}

}  // namespace quadvo::model
