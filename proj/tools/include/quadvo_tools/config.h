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

#ifndef QUADVO_TOOLS_CONFIG_H_
#define QUADVO_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadvo/dataset/synth.h"
#include "quadvo/eval/drift.h"
#include "quadvo/eval/report.h"
#include "quadvo/flow/lucas_kanade.h"
#include "quadvo/model/network.h"
#include "quadvo/train/fit.h"

namespace quadvo::tools {

/// Bad command line or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command can be configured with. Defaults follow the
/// selected profile ("desk" unless the config says "full").
struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 1;  // parameter initialisation seed

  model::ModelConfig model;
  train::TrainConfig train;
  flow::LkOptions lk;

  eval::SegmentOptions segments;
  eval::AggregateOptions aggregate;
  std::string align = "none";  // none | rigid | similarity

  dataset::SceneSpec scene;
  std::size_t synth_count = 64;  // increments for synthetic data
  dataset::Range dp{0.05, 0.2};
  dataset::Range dphi{-0.025, 0.025};

  int data_stride = 1;
  int data_width = 0;  // 0 = size of the first frame
  int data_height = 0;
};

/// Documented keys with one-line descriptions, in schema order.
const std::vector<std::pair<std::string, std::string>>& config_schema();

/// key = value lines; '#' starts a comment; blank lines are ignored.
/// Throws UsageError naming the line for malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& source);

/// Builds a RunConfig from an optional file plus KEY=VALUE overrides (the
/// overrides win). Throws UsageError naming any unknown key or bad value.
RunConfig load_run_config(const std::filesystem::path& file,
                          const std::vector<std::string>& overrides);

RunConfig make_run_config(const std::map<std::string, std::string>& values);

}  // namespace quadvo::tools

#endif  // QUADVO_TOOLS_CONFIG_H_
