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

#ifndef QUADVO_MODEL_NETWORK_H_
#define QUADVO_MODEL_NETWORK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "quadvo/flow/image.h"
#include "quadvo/geometry/pose.h"
#include "quadvo/model/quadrants.h"
#include "quadvo/numcore/tape.h"
#include "quadvo/numcore/tensor.h"

namespace quadvo::model {

using numcore::Parameter;
using numcore::Shape;
using numcore::Tape;
using numcore::Tensor;
using numcore::Var;

enum class Activation { kRelu, kLinear };

// Fixed layer geometry of one branch.
inline constexpr std::size_t kGapKernel = 4, kGapStride = 4, kGapPad = 2;
inline constexpr std::size_t kConv1Kernel = 9, kConv1Stride = 2, kConv1Pad = 4;
inline constexpr std::size_t kConv1Channels = 64;
inline constexpr std::size_t kPool1Kernel = 4, kPool1Stride = 4, kPool1Pad = 2;
inline constexpr std::size_t kConv2Kernel = 3, kConv2Stride = 2, kConv2Pad = 1;
inline constexpr std::size_t kConv2Channels = 20;
inline constexpr std::size_t kPool2Kernel = 2, kPool2Stride = 2, kPool2Pad = 1;
inline constexpr std::size_t kSpatialKernel = 7, kSpatialPad = 3;

struct ModelConfig {
  int reduction = 4;  // CBAM channel-MLP reduction ratio
  Activation activation = Activation::kRelu;
  double dropout = 0.5;       // head dropout rate, train mode only
  double flow_scale = 10.0;   // flow is divided by this before the branches
  int input_width = 1226;     // full flow-field size
  int input_height = 370;
  std::vector<int> hidden = {256, 64};
  bool channel_norm = false;  // per-channel normalisation after each conv

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  int quadrant_width() const { return input_width / 2; }
  int quadrant_height() const { return input_height / 2; }
};

struct CbamParams {
  Parameter mlp1_weight, mlp1_bias;  // C/r x C, C/r
  Parameter mlp2_weight, mlp2_bias;  // C x C/r, C
  Parameter spatial_weight, spatial_bias;  // 1 x 2 x 7 x 7, 1

  std::vector<Parameter*> list();
};

/// One feature-extractor stage: conv, optional norm, activation, CBAM.
struct StageParams {
  Parameter conv_weight, conv_bias;
  Parameter norm_gamma, norm_beta;  // used only with channel_norm
  CbamParams cbam;

  std::vector<Parameter*> list(bool with_norm);
};

struct BranchParams {
  StageParams fe1;
  StageParams fe2;

  std::vector<Parameter*> list(bool with_norm);
};

struct HeadParams {
  std::vector<Parameter> weights;  // layer i: out_i x in_i
  std::vector<Parameter> biases;

  std::vector<Parameter*> list();
};

struct Network {
  ModelConfig config;
  std::array<BranchParams, 4> branches;
  HeadParams head;

  /// Every trainable parameter in a fixed order: branches 0..3, then head.
  std::vector<Parameter*> parameters();
  std::size_t parameter_count();
};

// Tape-bound views of the parameter structures.
struct CbamVars {
  Var mlp1_weight, mlp1_bias, mlp2_weight, mlp2_bias, spatial_weight, spatial_bias;
};
struct StageVars {
  Var conv_weight, conv_bias, norm_gamma, norm_beta;
  bool with_norm = false;
  CbamVars cbam;
};
struct BranchVars {
  StageVars fe1, fe2;
};
struct HeadVars {
  std::vector<Var> weights, biases;
};

/// Builders that consume leaves in the order produced by the matching
/// list() call.
CbamVars cbam_vars(std::span<const Var> leaves);
BranchVars branch_vars(std::span<const Var> leaves, bool with_norm);
HeadVars head_vars(std::span<const Var> leaves);

CbamVars bind(Tape& tape, CbamParams& params);
BranchVars bind(Tape& tape, BranchParams& params, bool with_norm);
HeadVars bind(Tape& tape, HeadParams& params);

/// Channel attention followed by spatial attention on a C x H x W map:
///   M'  = sigmoid(MLP(avg_c(M)) + MLP(max_c(M))) * M
///   M'' = sigmoid(conv7x7([mean_k(M'); max_k(M')])) * M'
Var cbam(Var m, const CbamVars& params);

/// Shape after every branch layer for a quadrant of the given size.
struct LayerShape {
  std::string layer;
  Shape shape;
};
/// Throws std::invalid_argument naming the first layer whose window does
/// not fit its input.
std::vector<LayerShape> trace_branch(int quad_width, int quad_height);
std::size_t branch_feature_length(int quad_width, int quad_height);
std::size_t head_input_length(const ModelConfig& config);

/// 2 x H x W tensor of (u, v) divided by `scale`.
Tensor flow_tensor(const FlowField& field, double scale);

/// Branch encoder on a normalised 2 x H x W input:
/// GAP, FE1 (conv1, activation, CBAM, avgpool1), FE2 (conv2, activation,
/// CBAM, avgpool2), then Vec(FE1) concatenated with Vec(FE2).
Var branch_features(Var input, const BranchVars& params, const ModelConfig& config);

/// branch_features on a raw flow quadrant.
Var branch_forward(Tape& tape, const FlowField& quad, const BranchVars& params,
                   const ModelConfig& config);

struct ForwardOptions {
  bool train = false;             // enables dropout
  std::mt19937_64* rng = nullptr;  // required when train && dropout > 0
};

/// Dense, activation and dropout per hidden layer, then a dense layer with
/// two outputs.
Var head_forward(Var features, const HeadVars& params, const ModelConfig& config,
                 const ForwardOptions& options = {});

/// Full network on a quadrant set; returns a length-2 (dp, dphi) output.
Var forward(Tape& tape, const QuadrantSet& quads, Network& net,
            const ForwardOptions& options = {});

/// Eval-mode prediction on a full flow field. Returns the raw regression
/// output (dp is not clamped, dphi is not wrapped).
geometry::PoseIncrement predict(Network& net, const FlowField& field);

/// Xavier-uniform weights with bound sqrt(6 / (fan_in + fan_out)), zero
/// biases, unit norm scales. Reproducible for a fixed seed.
Network init_params(const ModelConfig& config, std::uint64_t seed);

}  // namespace quadvo::model

#endif  // QUADVO_MODEL_NETWORK_H_
