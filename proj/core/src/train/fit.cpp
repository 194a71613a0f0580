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

#include "quadvo/train/fit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "quadvo/dataset/batching.h"
#include "quadvo/numcore/tape.h"
#include "quadvo/train/loss.h"

namespace quadvo::train {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("train config: " + what);
  };
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (!(lr0 > 0.0)) fail("lr0 must be positive");
  if (halving_period < 1) fail("halving_period must be >= 1");
  if (!(beta1 > 0.0 && beta1 < 1.0)) fail("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (patience < 0) fail("patience must be >= 0");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) fail("val_fraction must lie in [0, 1)");
}

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.lr0 = 1e-3;
  c.halving_period = 60;
  c.batch_size = 8;
  c.max_epochs = 250;
  c.patience = 250;
  c.val_fraction = 0.0;
  c.max_steps = 2000;
  return c;
}

double learning_rate(const TrainConfig& config, int epoch) {
  return config.lr0 * std::pow(0.5, std::floor(static_cast<double>(epoch) /
                                               config.halving_period));
}

std::vector<Example> make_examples(std::span<const dataset::Sample> samples,
                                   const flow::LkOptions& lk) {
  std::vector<Example> out;
  out.reserve(samples.size());
  for (const dataset::Sample& s : samples) {
    const flow::FlowField field = s.flow ? *s.flow : flow::lk_flow(s.prev, s.next, lk);
    out.push_back({model::split_quadrants(field), s.gt});
  }
  return out;
}

namespace {

using Snapshot = std::vector<Tensor>;

Snapshot snapshot(model::Network& net) {
  Snapshot s;
  for (const Parameter* p : net.parameters()) s.push_back(p->value);
  return s;
}

void restore(model::Network& net, const Snapshot& s) {
  const std::vector<Parameter*> params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = s[i];
}

}  // namespace

double evaluate(model::Network& net, std::span<const Example> data, double alpha) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty data");
  double total = 0.0;
  for (const Example& e : data) {
    numcore::Tape tape;
    const numcore::Var out = model::forward(tape, e.quads, net);
    const double ep = out.value()[0] - e.gt.dp;
    const double ea = out.value()[1] - e.gt.dphi;
    total += ep * ep + alpha * ea * ea;
  }
  return total / static_cast<double>(data.size());
}

double angle_mse(model::Network& net, std::span<const Example> data) {
  if (data.empty()) throw std::invalid_argument("angle_mse: empty data");
  double total = 0.0;
  for (const Example& e : data) {
    numcore::Tape tape;
    const numcore::Var out = model::forward(tape, e.quads, net);
    const double ea = out.value()[1] - e.gt.dphi;
    total += ea * ea;
  }
  return total / static_cast<double>(data.size());
}

FitResult fit(std::span<const Example> data, model::Network& net, const TrainConfig& config,
              const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("fit: empty dataset");

  // Seeded train/validation split.
  std::vector<Example> train_set, val_set;
  std::size_t n_val = 0;
  if (config.val_fraction > 0.0 && data.size() >= 2) {
    n_val = static_cast<std::size_t>(std::llround(config.val_fraction * data.size()));
    n_val = std::clamp<std::size_t>(n_val, 1, data.size() - 1);
  }
  const std::vector<dataset::Batch> order = dataset::make_batches(data.size(), data.size(),
                                                                  config.seed);
  for (std::size_t k = 0; k < order[0].size(); ++k) {
    (k < n_val ? val_set : train_set).push_back(data[order[0][k]]);
  }
  const std::span<const Example> val =
      n_val > 0 ? std::span<const Example>(val_set) : std::span<const Example>(train_set);

  const std::vector<Parameter*> params = net.parameters();
  const AdamOptions adam_opts{config.beta1, config.beta2, config.epsilon};
  FitResult result;
  result.adam = adam_init(params);
  std::mt19937_64 rng(config.seed ^ 0x5deece66dULL);
  model::ForwardOptions fwd{true, &rng};

  Snapshot best = snapshot(net);
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  bool step_cap = false;

  for (int epoch = 0; epoch < config.max_epochs && !step_cap; ++epoch) {
    const double lr = learning_rate(config, epoch);
    const std::vector<dataset::Batch> batches =
        dataset::make_batches(train_set.size(), config.batch_size,
                              config.seed + 1000003ULL * (epoch + 1));
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (const dataset::Batch& batch : batches) {
      for (Parameter* p : params) p->zero_grad();
      const double w = 1.0 / static_cast<double>(batch.size());
      double batch_loss = 0.0;
      for (std::size_t idx : batch) {
        numcore::Tape tape;
        const Example& ex = train_set[idx];
        const numcore::Var pred = model::forward(tape, ex.quads, net, fwd);
        const numcore::Var loss = sample_loss(pred, ex.gt, config.alpha, w);
        batch_loss += loss.value()[0];
        try {
          tape.backward(loss);
        } catch (const numcore::NumericError&) {
          result.diverged = true;
        }
        if (result.diverged) break;
      }
      if (!result.diverged && !std::isfinite(batch_loss)) result.diverged = true;
      if (!result.diverged) {
        try {
          adam_step(params, result.adam, lr, adam_opts);
        } catch (const numcore::NumericError&) {
          result.diverged = true;
        }
      }
      if (result.diverged) break;
      epoch_loss += batch_loss * static_cast<double>(batch.size());
      seen += batch.size();
      ++result.steps;
      if (config.max_steps > 0 && result.steps >= config.max_steps) {
        step_cap = true;
        break;
      }
    }
    if (result.diverged) break;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(seen);
    rec.val_loss = evaluate(net, val, config.alpha);
    rec.lr = lr;
    if (!std::isfinite(rec.val_loss)) {
      result.diverged = true;
      break;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      best = snapshot(net);
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best > config.patience) {
      break;
    }
  }
  restore(net, best);
  result.best_val_loss = best_val;
  return result;
}

void write_history_csv(std::span<const EpochRecord> history, std::ostream& out) {
  out << "epoch,train_loss,val_loss,lr\n";
  char buf[128];
  for (const EpochRecord& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss,
                  r.val_loss, r.lr);
    out << buf;
  }
}

}  // namespace quadvo::train
