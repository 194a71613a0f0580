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

#ifndef QUADVO_TESTS_SUPPORT_GRAD_SUITES_H_
#define QUADVO_TESTS_SUPPORT_GRAD_SUITES_H_

#include <cstddef>
#include <string>
#include <vector>

#include "quadvo/numcore/grad_check.h"

namespace quadvo::testing {

struct GradSuite {
  std::string name;
  numcore::GradCheckBuilder builder;
  std::size_t max_coords = 0;  // per parameter, 0 = all
};

// conv2d, pool2d (average and max), dense, sigmoid, cbam, branch, head
// (eval and train mode) and the pose loss.
std::vector<GradSuite> gradient_suites();

}  // namespace quadvo::testing

#endif  // QUADVO_TESTS_SUPPORT_GRAD_SUITES_H_
