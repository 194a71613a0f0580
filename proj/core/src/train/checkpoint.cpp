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

#include "quadvo/train/checkpoint.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "quadvo/errors.h"

namespace quadvo::train {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xff));
    }
  }
  void f64(double d) { le(std::bit_cast<std::uint64_t>(d)); }

  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw FormatError(std::string("checkpoint: truncated ") + what + " at byte " +
                        std::to_string(pos_));
    }
  }
  template <typename T>
  T le(const char* what) {
    need(sizeof(T), what);
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return value;
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

Tensor scalar(double v) { return Tensor::scalar(v); }

double get_scalar(const Checkpoint& c, const std::string& name) {
  const Tensor* t = c.find(name);
  if (t == nullptr || t->size() != 1) {
    throw std::invalid_argument("checkpoint: missing scalar entry '" + name + "'");
  }
  return (*t)[0];
}

int get_int(const Checkpoint& c, const std::string& name) {
  const double v = get_scalar(c, name);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw std::invalid_argument("checkpoint: entry '" + name + "' is not an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const CheckpointEntry& e : entries) {
    if (e.name == name) return &e.value;
  }
  return nullptr;
}

void Checkpoint::add(std::string name, Tensor value) {
  entries.push_back({std::move(name), std::move(value)});
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  Writer w;
  w.bytes(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.le<std::uint32_t>(kCheckpointVersion);
  w.le<std::uint64_t>(checkpoint.entries.size());
  for (const CheckpointEntry& e : checkpoint.entries) {
    w.le<std::uint32_t>(static_cast<std::uint32_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.le<std::uint32_t>(static_cast<std::uint32_t>(e.value.rank()));
    for (std::size_t d : e.value.shape()) w.le<std::uint64_t>(d);
    for (double v : e.value.data()) w.f64(v);
  }
  return std::move(w.out);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const std::string magic = r.str(sizeof(kCheckpointMagic), "magic");
  if (magic != std::string(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw FormatError("checkpoint: bad magic (not a DAVOCKPT file)");
  }
  const auto version = r.le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = r.le<std::uint64_t>("entry count");
  Checkpoint c;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.le<std::uint32_t>("entry name length");
    std::string name = r.str(len, "entry name");
    const auto rank = r.le<std::uint32_t>("entry rank");
    if (rank > 16) {
      throw FormatError("checkpoint: entry '" + name + "' has implausible rank " +
                        std::to_string(rank));
    }
    numcore::Shape shape;
    std::uint64_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const auto d = r.le<std::uint64_t>("entry dimensions");
      if (d == 0) throw FormatError("checkpoint: entry '" + name + "' has a zero dimension");
      if (d > r.remaining() || n > r.remaining() / d) {
        throw FormatError("checkpoint: truncated values of entry '" + name + "'");
      }
      n *= d;
      shape.push_back(static_cast<std::size_t>(d));
    }
    r.need(static_cast<std::size_t>(n) * 8, "entry values");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = std::bit_cast<double>(r.le<std::uint64_t>("entry values"));
    c.add(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  if (!r.done()) {
    throw FormatError("checkpoint: " + std::to_string(r.remaining()) +
                      " trailing bytes after the last entry");
  }
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Checkpoint make_checkpoint(model::Network& net, const AdamState* adam, int epoch,
                           std::span<const EpochRecord> history) {
  const model::ModelConfig& cfg = net.config;
  Checkpoint c;
  c.add("config/reduction", scalar(cfg.reduction));
  c.add("config/activation", scalar(cfg.activation == model::Activation::kRelu ? 0 : 1));
  c.add("config/dropout", scalar(cfg.dropout));
  c.add("config/flow_scale", scalar(cfg.flow_scale));
  c.add("config/input_width", scalar(cfg.input_width));
  c.add("config/input_height", scalar(cfg.input_height));
  c.add("config/channel_norm", scalar(cfg.channel_norm ? 1 : 0));
  c.add("config/hidden_layers", scalar(static_cast<double>(cfg.hidden.size())));
  if (!cfg.hidden.empty()) {
    c.add("config/hidden", Tensor::vector({cfg.hidden.begin(), cfg.hidden.end()}));
  }
  const std::vector<model::Parameter*> params = net.parameters();
  for (const model::Parameter* p : params) c.add("param/" + p->name, p->value);
  if (adam != nullptr) {
    if (adam->m.size() != params.size()) {
      throw std::invalid_argument("make_checkpoint: optimizer state does not match the model");
    }
    c.add("adam/step", scalar(static_cast<double>(adam->step)));
    for (std::size_t i = 0; i < params.size(); ++i) {
      c.add("adam/m/" + params[i]->name, adam->m[i]);
      c.add("adam/v/" + params[i]->name, adam->v[i]);
    }
  }
  c.add("train/epoch", scalar(epoch));
  if (!history.empty()) {
    std::vector<double> rows;
    for (const EpochRecord& r : history) {
      rows.insert(rows.end(), {static_cast<double>(r.epoch), r.train_loss, r.val_loss, r.lr});
    }
    c.add("train/history", Tensor({history.size(), 4}, std::move(rows)));
  }
  return c;
}

model::Network restore_network(const Checkpoint& c) {
  model::ModelConfig cfg;
  cfg.reduction = get_int(c, "config/reduction");
  cfg.activation = get_int(c, "config/activation") == 0 ? model::Activation::kRelu
                                                        : model::Activation::kLinear;
  cfg.dropout = get_scalar(c, "config/dropout");
  cfg.flow_scale = get_scalar(c, "config/flow_scale");
  cfg.input_width = get_int(c, "config/input_width");
  cfg.input_height = get_int(c, "config/input_height");
  cfg.channel_norm = get_int(c, "config/channel_norm") != 0;
  const int layers = get_int(c, "config/hidden_layers");
  cfg.hidden.clear();
  if (layers > 0) {
    const Tensor* h = c.find("config/hidden");
    if (h == nullptr || h->size() != static_cast<std::size_t>(layers)) {
      throw std::invalid_argument("checkpoint: entry 'config/hidden' is missing or mis-sized");
    }
    for (double v : h->data()) cfg.hidden.push_back(static_cast<int>(v));
  }
  model::Network net = model::init_params(cfg, 0);
  for (model::Parameter* p : net.parameters()) {
    const Tensor* t = c.find("param/" + p->name);
    if (t == nullptr) {
      throw std::invalid_argument("checkpoint: missing parameter '" + p->name + "'");
    }
    if (t->shape() != p->value.shape()) {
      throw std::invalid_argument("checkpoint: parameter '" + p->name + "' has shape " +
                                  numcore::shape_string(t->shape()) + ", model expects " +
                                  numcore::shape_string(p->value.shape()));
    }
    p->value = *t;
  }
  return net;
}

AdamState restore_adam(const Checkpoint& c, model::Network& net) {
  const std::vector<model::Parameter*> params = net.parameters();
  AdamState s = adam_init(params);
  if (c.find("adam/step") == nullptr) return s;
  s.step = static_cast<std::uint64_t>(get_scalar(c, "adam/step"));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor* m = c.find("adam/m/" + params[i]->name);
    const Tensor* v = c.find("adam/v/" + params[i]->name);
    if (m == nullptr || v == nullptr || m->shape() != params[i]->value.shape() ||
        v->shape() != params[i]->value.shape()) {
      throw std::invalid_argument("checkpoint: optimizer state for '" + params[i]->name +
                                  "' is missing or mis-shaped");
    }
    s.m[i] = *m;
    s.v[i] = *v;
  }
  return s;
}

std::vector<EpochRecord> restore_history(const Checkpoint& c) {
  std::vector<EpochRecord> out;
  const Tensor* h = c.find("train/history");
  if (h == nullptr) return out;
  if (h->rank() != 2 || h->dim(1) != 4) {
    throw std::invalid_argument("checkpoint: 'train/history' must be E x 4");
  }
  for (std::size_t i = 0; i < h->dim(0); ++i) {
    out.push_back({static_cast<int>((*h)[4 * i]), (*h)[4 * i + 1], (*h)[4 * i + 2],
                   (*h)[4 * i + 3]});
  }
  return out;
}

}  // namespace quadvo::train
