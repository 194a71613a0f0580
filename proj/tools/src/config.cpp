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

#include "quadvo_tools/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace quadvo::tools {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw UsageError("config key '" + key + "': expected " + expected + ", got '" + value +
                   "'");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  return static_cast<int>(to_integer(key, v));
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long n = to_integer(key, v);
  if (n < 0) bad_value(key, v, "a non-negative integer");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string&)>;

struct KeySpec {
  const char* key;
  const char* help;
  Setter set;
};

const std::vector<KeySpec>& specs() {
  static const std::vector<KeySpec> s = {
      {"profile", "desk | full: base defaults for model and training",
       [](RunConfig&, const std::string&, const std::string&) {}},
      {"seed", "parameter initialisation seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(to_count(k, v));
       }},
      {"model.reduction", "CBAM channel reduction ratio (divides 64 and 20)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.reduction = to_int(k, v);
       }},
      {"model.activation", "relu | linear",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "relu") {
           c.model.activation = model::Activation::kRelu;
         } else if (v == "linear") {
           c.model.activation = model::Activation::kLinear;
         } else {
           bad_value(k, v, "relu or linear");
         }
       }},
      {"model.dropout", "head dropout rate in [0, 1)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.dropout = to_double(k, v);
       }},
      {"model.flow_scale", "flow divisor applied before the network",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.flow_scale = to_double(k, v);
       }},
      {"model.hidden", "comma-separated hidden widths of the head",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.hidden.clear();
         for (double d : to_list(k, v)) c.model.hidden.push_back(static_cast<int>(d));
       }},
      {"model.channel_norm", "per-channel normalisation after each conv",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.channel_norm = to_bool(k, v);
       }},
      {"train.alpha", "angle weight of the loss",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.alpha = to_double(k, v);
       }},
      {"train.lr0", "initial learning rate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.lr0 = to_double(k, v);
       }},
      {"train.halving_period", "epochs between learning-rate halvings",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.halving_period = to_int(k, v);
       }},
      {"train.beta1", "Adam beta1",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.beta1 = to_double(k, v);
       }},
      {"train.beta2", "Adam beta2",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.beta2 = to_double(k, v);
       }},
      {"train.epsilon", "Adam epsilon",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.epsilon = to_double(k, v);
       }},
      {"train.batch_size", "samples per optimizer step",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.batch_size = to_count(k, v);
       }},
      {"train.max_epochs", "epoch limit",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.max_epochs = to_int(k, v);
       }},
      {"train.patience", "epochs without validation improvement before stopping",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.patience = to_int(k, v);
       }},
      {"train.val_fraction", "held-out fraction; 0 validates on the training set",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.val_fraction = to_double(k, v);
       }},
      {"train.max_steps", "optimizer step limit, 0 for none",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.max_steps = to_count(k, v);
       }},
      {"train.seed", "shuffling, split and dropout seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.train.seed = static_cast<std::uint64_t>(to_count(k, v));
       }},
      {"flow.window", "Lucas-Kanade window (odd)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lk.window = to_int(k, v);
       }},
      {"flow.levels", "pyramid levels",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lk.levels = to_int(k, v);
       }},
      {"flow.iterations", "refinement rounds per level",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lk.iterations = to_int(k, v);
       }},
      {"flow.min_eigenvalue", "structure-matrix eigenvalue threshold",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.lk.min_eigenvalue = to_double(k, v);
       }},
      {"eval.lengths", "comma-separated segment lengths in metres",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.segments.lengths = to_list(k, v);
         c.aggregate.lengths = c.segments.lengths;
       }},
      {"eval.step", "start-frame stride",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.segments.step = to_count(k, v);
       }},
      {"eval.frame_period", "seconds per frame",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.segments.frame_period = to_double(k, v);
       }},
      {"eval.speed_edges", "comma-separated ascending speed-bin edges in m/s",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.aggregate.speed_edges = to_list(k, v);
       }},
      {"eval.aggregation", "mean | rms",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "mean") {
           c.aggregate.aggregation = eval::Aggregation::kMean;
         } else if (v == "rms") {
           c.aggregate.aggregation = eval::Aggregation::kRms;
         } else {
           bad_value(k, v, "mean or rms");
         }
       }},
      {"eval.align", "none | rigid | similarity",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "none" && v != "rigid" && v != "similarity") {
           bad_value(k, v, "none, rigid or similarity");
         }
         c.align = v;
       }},
      {"synth.texture_seed", "ground texture seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.seed = static_cast<std::uint64_t>(to_count(k, v));
       }},
      {"synth.count", "number of frame-to-frame increments",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.synth_count = to_count(k, v);
       }},
      {"synth.width", "rendered image width",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.width = to_int(k, v);
       }},
      {"synth.height", "rendered image height",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.height = to_int(k, v);
       }},
      {"synth.focal", "focal length in pixels",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.focal = to_double(k, v);
       }},
      {"synth.camera_height", "camera height above the ground in metres",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.camera_height = to_double(k, v);
       }},
      {"synth.octaves", "value-noise octaves",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.octaves = to_int(k, v);
       }},
      {"synth.cell", "coarsest texture cell in metres",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.cell = to_double(k, v);
       }},
      {"synth.pitch", "downward camera tilt in radians",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.pitch = to_double(k, v);
       }},
      {"synth.sky_distance", "ground farther than this renders as sky",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.sky_distance = to_double(k, v);
       }},
      {"synth.supersample", "rays per pixel along each axis",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scene.supersample = to_int(k, v);
       }},
      {"synth.dp_min", "smallest step length in metres",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dp.lo = to_double(k, v);
       }},
      {"synth.dp_max", "largest step length in metres",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dp.hi = to_double(k, v);
       }},
      {"synth.dphi_min", "smallest heading change in radians",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dphi.lo = to_double(k, v);
       }},
      {"synth.dphi_max", "largest heading change in radians",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.dphi.hi = to_double(k, v);
       }},
      {"data.stride", "keep every n-th frame of a sequence",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data_stride = to_int(k, v);
       }},
      {"data.width", "unified frame width, 0 = first frame's width",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data_width = to_int(k, v);
       }},
      {"data.height", "unified frame height, 0 = first frame's height",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.data_height = to_int(k, v);
       }},
  };
  return s;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_schema() {
  static const std::vector<std::pair<std::string, std::string>> out = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (const KeySpec& s : specs()) v.emplace_back(s.key, s.help);
    return v;
  }();
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& source) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError(source + ":" + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig make_run_config(const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    bool known = false;
    for (const KeySpec& s : specs()) known = known || key == s.key;
    if (!known) throw UsageError("unknown config key '" + key + "'");
  }
  RunConfig c;
  const auto profile = values.find("profile");
  c.profile = profile == values.end() ? "desk" : profile->second;
  if (c.profile == "desk") {
    c.train = train::TrainConfig::desk();
    c.model.dropout = 0.0;
  } else if (c.profile != "full") {
    bad_value("profile", c.profile, "desk or full");
  }
  for (const KeySpec& s : specs()) {
    const auto it = values.find(s.key);
    if (it != values.end()) s.set(c, it->first, it->second);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file,
                          const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> values;
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot read config file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    values = parse_config_text(buf.str(), file.string());
  }
  for (const std::string& o : overrides) {
    const auto parsed = parse_config_text(o, "--set " + o);
    if (parsed.empty()) throw UsageError("--set expects KEY=VALUE, got '" + o + "'");
    for (const auto& [k, v] : parsed) values[k] = v;
  }
  return make_run_config(values);
}

}  // namespace quadvo::tools
