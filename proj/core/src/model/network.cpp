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

#include "quadvo/model/network.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "quadvo/numcore/ops.h"

namespace quadvo::model {

namespace nc = numcore;
using nc::PoolKind;

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("model config: " + what);
  };
  if (reduction < 1 || kConv1Channels % reduction != 0 ||
      kConv2Channels % reduction != 0) {
    fail("reduction must divide 64 and 20, got " + std::to_string(reduction));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    fail("dropout must lie in [0, 1), got " + std::to_string(dropout));
  }
  if (!(flow_scale > 0.0) || !std::isfinite(flow_scale)) {
    fail("flow_scale must be positive");
  }
  if (input_width < 2 || input_height < 2) fail("input size must be at least 2x2");
  for (int h : hidden) {
    if (h < 1) fail("hidden widths must be positive");
  }
  trace_branch(quadrant_width(), quadrant_height());
}

std::vector<Parameter*> CbamParams::list() {
  return {&mlp1_weight, &mlp1_bias, &mlp2_weight, &mlp2_bias, &spatial_weight,
          &spatial_bias};
}

std::vector<Parameter*> StageParams::list(bool with_norm) {
  std::vector<Parameter*> out{&conv_weight, &conv_bias};
  if (with_norm) {
    out.push_back(&norm_gamma);
    out.push_back(&norm_beta);
  }
  for (Parameter* p : cbam.list()) out.push_back(p);
  return out;
}

std::vector<Parameter*> BranchParams::list(bool with_norm) {
  std::vector<Parameter*> out = fe1.list(with_norm);
  for (Parameter* p : fe2.list(with_norm)) out.push_back(p);
  return out;
}

std::vector<Parameter*> HeadParams::list() {
  std::vector<Parameter*> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.push_back(&weights[i]);
    out.push_back(&biases[i]);
  }
  return out;
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (BranchParams& b : branches) {
    for (Parameter* p : b.list(config.channel_norm)) out.push_back(p);
  }
  for (Parameter* p : head.list()) out.push_back(p);
  return out;
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (Parameter* p : parameters()) n += p->value.size();
  return n;
}

namespace {

std::size_t stage_size(bool with_norm) { return with_norm ? 10 : 8; }

StageVars stage_vars(std::span<const Var> leaves, bool with_norm) {
  if (leaves.size() != stage_size(with_norm)) {
    throw std::invalid_argument("stage_vars: expected " +
                                std::to_string(stage_size(with_norm)) + " leaves");
  }
  StageVars s;
  s.with_norm = with_norm;
  s.conv_weight = leaves[0];
  s.conv_bias = leaves[1];
  std::size_t k = 2;
  if (with_norm) {
    s.norm_gamma = leaves[2];
    s.norm_beta = leaves[3];
    k = 4;
  }
  s.cbam = cbam_vars(leaves.subspan(k, 6));
  return s;
}

std::vector<Var> bind_all(Tape& tape, const std::vector<Parameter*>& params) {
  std::vector<Var> out;
  out.reserve(params.size());
  for (Parameter* p : params) out.push_back(tape.parameter(*p));
  return out;
}

Var activate(Var x, Activation a) {
  return a == Activation::kRelu ? nc::relu(x) : x;
}

Var stage(Var x, const StageVars& p, const ModelConfig& config, std::size_t stride,
          std::size_t pad) {
  Var y = nc::conv2d(x, p.conv_weight, p.conv_bias, stride, pad);
  if (p.with_norm) y = nc::channel_norm(y, p.norm_gamma, p.norm_beta);
  y = activate(y, config.activation);
  return cbam(y, p.cbam);
}

Shape window_shape(const char* layer, const Shape& in, std::size_t channels,
                   std::size_t k, std::size_t stride, std::size_t pad) {
  const std::size_t h = in[1], w = in[2];
  if (h + 2 * pad < k || w + 2 * pad < k) {
    throw std::invalid_argument(std::string("branch: input ") + nc::shape_string(in) +
                                " is too small for layer '" + layer + "' (window " +
                                std::to_string(k) + ", pad " + std::to_string(pad) +
                                ")");
  }
  return {channels, nc::window_output_size(h, k, stride, pad),
          nc::window_output_size(w, k, stride, pad)};
}

// Uniform [0, 1) from 53 random bits.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Tensor xavier(Shape shape, std::size_t fan_in, std::size_t fan_out,
              std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = (2.0 * unit(rng) - 1.0) * bound;
  return t;
}

void init_cbam(CbamParams& p, const std::string& prefix, std::size_t c,
               std::size_t r, std::mt19937_64& rng) {
  const std::size_t hidden = c / r;
  const std::size_t kk = kSpatialKernel * kSpatialKernel;
  p.mlp1_weight = Parameter(prefix + "/mlp1/weight", xavier({hidden, c}, c, hidden, rng));
  p.mlp1_bias = Parameter(prefix + "/mlp1/bias", Tensor({hidden}));
  p.mlp2_weight = Parameter(prefix + "/mlp2/weight", xavier({c, hidden}, hidden, c, rng));
  p.mlp2_bias = Parameter(prefix + "/mlp2/bias", Tensor({c}));
  p.spatial_weight = Parameter(prefix + "/spatial/weight",
                               xavier({1, 2, kSpatialKernel, kSpatialKernel}, 2 * kk,
                                      kk, rng));
  p.spatial_bias = Parameter(prefix + "/spatial/bias", Tensor({1}));
}

}  // namespace

CbamVars cbam_vars(std::span<const Var> leaves) {
  if (leaves.size() != 6) throw std::invalid_argument("cbam_vars: expected 6 leaves");
  return {leaves[0], leaves[1], leaves[2], leaves[3], leaves[4], leaves[5]};
}

BranchVars branch_vars(std::span<const Var> leaves, bool with_norm) {
  const std::size_t n = stage_size(with_norm);
  if (leaves.size() != 2 * n) {
    throw std::invalid_argument("branch_vars: expected " + std::to_string(2 * n) +
                                " leaves, got " + std::to_string(leaves.size()));
  }
  return {stage_vars(leaves.first(n), with_norm), stage_vars(leaves.subspan(n), with_norm)};
}

HeadVars head_vars(std::span<const Var> leaves) {
  if (leaves.empty() || leaves.size() % 2 != 0) {
    throw std::invalid_argument("head_vars: expected weight/bias pairs");
  }
  HeadVars h;
  for (std::size_t i = 0; i < leaves.size(); i += 2) {
    h.weights.push_back(leaves[i]);
    h.biases.push_back(leaves[i + 1]);
  }
  return h;
}

CbamVars bind(Tape& tape, CbamParams& params) {
  return cbam_vars(bind_all(tape, params.list()));
}

BranchVars bind(Tape& tape, BranchParams& params, bool with_norm) {
  return branch_vars(bind_all(tape, params.list(with_norm)), with_norm);
}

HeadVars bind(Tape& tape, HeadParams& params) {
  return head_vars(bind_all(tape, params.list()));
}

Var cbam(Var m, const CbamVars& p) {
  const Shape& s = m.shape();
  if (s.size() != 3) {
    throw nc::ShapeError("cbam: expected a C x H x W map, got " + nc::shape_string(s));
  }
  const std::size_t c = s[0], h = s[1], w = s[2];
  const Shape& w1 = p.mlp1_weight.shape();
  if (w1.size() != 2 || w1[1] != c) {
    throw nc::ShapeError("cbam: input has " + std::to_string(c) +
                         " channels but the channel MLP expects " +
                         (w1.size() == 2 ? std::to_string(w1[1]) : std::string("?")));
  }

  // Channel attention.
  Var planes = nc::reshape(m, {c, h * w});
  auto mlp = [&](Var v) {
    Var hid = nc::relu(nc::dense(v, p.mlp1_weight, p.mlp1_bias));
    return nc::dense(hid, p.mlp2_weight, p.mlp2_bias);
  };
  Var avg = nc::reshape(nc::reduce(planes, 1, PoolKind::kAverage), {c});
  Var mx = nc::reshape(nc::reduce(planes, 1, PoolKind::kMax), {c});
  Var gate_c = nc::sigmoid(nc::add(mlp(avg), mlp(mx)));
  Var m1 = nc::mul(m, nc::reshape(gate_c, {c, 1, 1}));

  // Spatial attention.
  Var pooled = nc::concat(nc::reduce(m1, 0, PoolKind::kAverage),
                          nc::reduce(m1, 0, PoolKind::kMax), 0);
  Var gate_s = nc::sigmoid(
      nc::conv2d(pooled, p.spatial_weight, p.spatial_bias, 1, kSpatialPad));
  return nc::mul(m1, gate_s);
}

std::vector<LayerShape> trace_branch(int quad_width, int quad_height) {
  if (quad_width < 1 || quad_height < 1) {
    throw std::invalid_argument("branch: quadrant size must be positive");
  }
  std::vector<LayerShape> out;
  Shape s{2, static_cast<std::size_t>(quad_height), static_cast<std::size_t>(quad_width)};
  out.push_back({"input", s});
  s = window_shape("gap", s, 2, kGapKernel, kGapStride, kGapPad);
  out.push_back({"gap", s});
  s = window_shape("conv1", s, kConv1Channels, kConv1Kernel, kConv1Stride, kConv1Pad);
  out.push_back({"conv1", s});
  window_shape("cbam1", s, 1, kSpatialKernel, 1, kSpatialPad);
  out.push_back({"cbam1", s});
  s = window_shape("avgpool1", s, kConv1Channels, kPool1Kernel, kPool1Stride, kPool1Pad);
  out.push_back({"avgpool1", s});
  s = window_shape("conv2", s, kConv2Channels, kConv2Kernel, kConv2Stride, kConv2Pad);
  out.push_back({"conv2", s});
  window_shape("cbam2", s, 1, kSpatialKernel, 1, kSpatialPad);
  out.push_back({"cbam2", s});
  s = window_shape("avgpool2", s, kConv2Channels, kPool2Kernel, kPool2Stride, kPool2Pad);
  out.push_back({"avgpool2", s});
  return out;
}

std::size_t branch_feature_length(int quad_width, int quad_height) {
  std::size_t fe1 = 0, fe2 = 0;
  for (const LayerShape& l : trace_branch(quad_width, quad_height)) {
    if (l.layer == "avgpool1") fe1 = nc::shape_size(l.shape);
    if (l.layer == "avgpool2") fe2 = nc::shape_size(l.shape);
  }
  return fe1 + fe2;
}

std::size_t head_input_length(const ModelConfig& config) {
  return 4 * branch_feature_length(config.quadrant_width(), config.quadrant_height());
}

Tensor flow_tensor(const FlowField& field, double scale) {
  const std::size_t area = static_cast<std::size_t>(field.width()) * field.height();
  std::vector<double> data(2 * area);
  const auto u = field.u_data();
  const auto v = field.v_data();
  for (std::size_t i = 0; i < area; ++i) {
    data[i] = u[i] / scale;
    data[area + i] = v[i] / scale;
  }
  return Tensor({2, static_cast<std::size_t>(field.height()),
                 static_cast<std::size_t>(field.width())},
                std::move(data));
}

Var branch_features(Var input, const BranchVars& params, const ModelConfig& config) {
  const Shape& s = input.shape();
  if (s.size() != 3 || s[0] != 2) {
    throw nc::ShapeError("branch: expected a 2 x H x W input, got " + nc::shape_string(s));
  }
  trace_branch(static_cast<int>(s[2]), static_cast<int>(s[1]));
  Var x = nc::pool2d(input, PoolKind::kAverage, kGapKernel, kGapStride, kGapPad);
  x = stage(x, params.fe1, config, kConv1Stride, kConv1Pad);
  Var fe1 = nc::pool2d(x, PoolKind::kAverage, kPool1Kernel, kPool1Stride, kPool1Pad);
  x = stage(fe1, params.fe2, config, kConv2Stride, kConv2Pad);
  Var fe2 = nc::pool2d(x, PoolKind::kAverage, kPool2Kernel, kPool2Stride, kPool2Pad);
  return nc::concat(nc::flatten(fe1), nc::flatten(fe2), 0);
}

Var branch_forward(Tape& tape, const FlowField& quad, const BranchVars& params,
                   const ModelConfig& config) {
  return branch_features(tape.constant(flow_tensor(quad, config.flow_scale)), params,
                         config);
}

Var head_forward(Var features, const HeadVars& params, const ModelConfig& config,
                 const ForwardOptions& options) {
  const std::size_t layers = params.weights.size();
  if (layers == 0) throw std::invalid_argument("head: no layers");
  const Shape& w0 = params.weights[0].shape();
  if (features.shape().size() != 1 || w0.size() != 2 || features.shape()[0] != w0[1]) {
    throw nc::ShapeError("head: feature vector " + nc::shape_string(features.shape()) +
                         " does not match the first head layer " + nc::shape_string(w0));
  }
  const bool drop = options.train && config.dropout > 0.0;
  if (drop && options.rng == nullptr) {
    throw std::invalid_argument("head: train-mode dropout needs a random generator");
  }
  Var x = features;
  for (std::size_t i = 0; i < layers; ++i) {
    x = nc::dense(x, params.weights[i], params.biases[i]);
    if (i + 1 == layers) break;
    x = activate(x, config.activation);
    if (drop) {
      const double keep = 1.0 - config.dropout;
      Tensor mask(x.shape());
      for (double& m : mask.data()) m = unit(*options.rng) < keep ? 1.0 / keep : 0.0;
      x = nc::mul(x, x.tape().constant(std::move(mask)));
    }
  }
  return x;
}

Var forward(Tape& tape, const QuadrantSet& quads, Network& net,
            const ForwardOptions& options) {
  const ModelConfig& cfg = net.config;
  std::array<Var, 4> parts;
  for (int q = 0; q < 4; ++q) {
    const BranchVars bv = bind(tape, net.branches[q], cfg.channel_norm);
    parts[q] = branch_forward(tape, quads.quads[q], bv, cfg);
  }
  Var features = nc::concat(parts, 0);
  return head_forward(features, bind(tape, net.head), cfg, options);
}

geometry::PoseIncrement predict(Network& net, const FlowField& field) {
  Tape tape;
  const Var out = forward(tape, split_quadrants(field), net);
  return {out.value()[0], out.value()[1]};
}

Network init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Network net;
  net.config = config;
  const auto r = static_cast<std::size_t>(config.reduction);
  auto stage_init = [&](StageParams& p, const std::string& prefix, const char* conv,
                        const char* cb, std::size_t in_c, std::size_t out_c,
                        std::size_t k) {
    p.conv_weight = Parameter(prefix + conv + "/weight",
                              xavier({out_c, in_c, k, k}, in_c * k * k, out_c * k * k, rng));
    p.conv_bias = Parameter(prefix + conv + "/bias", Tensor({out_c}));
    p.norm_gamma = Parameter(prefix + conv + "/norm_gamma", Tensor({out_c}, 1.0));
    p.norm_beta = Parameter(prefix + conv + "/norm_beta", Tensor({out_c}));
    init_cbam(p.cbam, prefix + cb, out_c, r, rng);
  };
  for (int b = 0; b < 4; ++b) {
    const std::string prefix = "branch" + std::to_string(b) + "/";
    stage_init(net.branches[b].fe1, prefix, "conv1", "cbam1", 2, kConv1Channels,
               kConv1Kernel);
    stage_init(net.branches[b].fe2, prefix, "conv2", "cbam2", kConv1Channels,
               kConv2Channels, kConv2Kernel);
  }
  std::size_t in = head_input_length(config);
  std::vector<std::size_t> widths(config.hidden.begin(), config.hidden.end());
  widths.push_back(2);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const std::string prefix = "head/dense" + std::to_string(i);
    net.head.weights.emplace_back(prefix + "/weight", xavier({widths[i], in}, in, widths[i], rng));
    net.head.biases.emplace_back(prefix + "/bias", Tensor({widths[i]}));
    in = widths[i];
  }
  return net;
}

}  // namespace quadvo::model
