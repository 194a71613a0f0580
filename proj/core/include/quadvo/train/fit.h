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

#ifndef QUADVO_TRAIN_FIT_H_
#define QUADVO_TRAIN_FIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "quadvo/dataset/synth.h"
#include "quadvo/flow/lucas_kanade.h"
#include "quadvo/model/network.h"
#include "quadvo/model/quadrants.h"
#include "quadvo/train/adam.h"
#include "quadvo/train/checkpoint.h"

namespace quadvo::train {

struct TrainConfig {
  double alpha = 100.0;
  double lr0 = 1e-4;
  int halving_period = 15;  // epochs
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::size_t batch_size = 48;
  int max_epochs = 70;
  int patience = 10;          // epochs without improvement tolerated
  double val_fraction = 0.1;  // 0 validates on the training set
  std::size_t max_steps = 0;  // optimizer step cap, 0 = none
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Small-data setting used for synthetic desk-scale runs.
  static TrainConfig desk();
};

/// lr0 * 0.5^floor(epoch / halving_period).
double learning_rate(const TrainConfig& config, int epoch);

/// A network input with its target.
struct Example {
  model::QuadrantSet quads;
  geometry::PoseIncrement gt;
};

/// Flow for every sample (precomputed flow is used when present), split
/// into quadrants.
std::vector<Example> make_examples(std::span<const dataset::Sample> samples,
                                   const flow::LkOptions& lk = {});

struct FitResult {
  std::vector<EpochRecord> history;
  AdamState adam;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  std::size_t steps = 0;
  bool diverged = false;
};

/// Eval-mode loss averaged over `data`.
double evaluate(model::Network& net, std::span<const Example> data, double alpha);

/// Mean squared angle error (dphi channel only) in eval mode.
double angle_mse(model::Network& net, std::span<const Example> data);

/// Trains `net` in place with Adam. The data is split (seeded) into train
/// and validation parts; each epoch shuffles the training part into
/// batches, with dropout active. After every epoch the validation loss is
/// measured with dropout off and the best parameters are kept. Training
/// stops once more than `patience` epochs pass without improvement, at
/// max_epochs, at max_steps, or when a loss or gradient turns non-finite
/// (diverged). On return `net` holds the best parameters seen.
/// `on_epoch`, when set, is called after every epoch.
FitResult fit(std::span<const Example> data, model::Network& net, const TrainConfig& config,
              const std::function<void(const EpochRecord&)>& on_epoch = {});

/// "epoch,train_loss,val_loss,lr" rows.
void write_history_csv(std::span<const EpochRecord> history, std::ostream& out);

}  // namespace quadvo::train

#endif  // QUADVO_TRAIN_FIT_H_
