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

#ifndef QUADVO_TOOLS_PLOT_H_
#define QUADVO_TOOLS_PLOT_H_

#include <string>
#include <vector>

#include "quadvo/geometry/pose.h"

namespace quadvo::tools {

/// Top-down X-Z trajectory plot: one polyline per trajectory, a legend in
/// input order and axis ticks in metres. Output depends only on the inputs.
std::string trajectory_svg(const std::vector<std::vector<geometry::PoseMatrix>>& trajectories,
                           const std::vector<std::string>& labels);

}  // namespace quadvo::tools

#endif  // QUADVO_TOOLS_PLOT_H_
