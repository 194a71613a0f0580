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

#include "quadvo/train/loss.h"

#include <stdexcept>
#include <string>

#include "quadvo/numcore/ops.h"

namespace quadvo::train {

namespace nc = numcore;

namespace {

void check_batch(std::size_t preds, std::size_t gts) {
  if (preds == 0) throw std::invalid_argument("loss: empty batch");
  if (preds != gts) {
    throw std::invalid_argument("loss: " + std::to_string(preds) + " predictions for " +
                                std::to_string(gts) + " targets");
  }
}

}  // namespace

double pose_loss(std::span<const PoseIncrement> preds, std::span<const PoseIncrement> gts,
                 double alpha) {
  check_batch(preds.size(), gts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double ep = preds[i].dp - gts[i].dp;
    const double ea = preds[i].dphi - gts[i].dphi;
    total += ep * ep + alpha * ea * ea;
  }
  return total / static_cast<double>(preds.size());
}

Var sample_loss(Var pred, const PoseIncrement& gt, double alpha, double weight) {
  if (pred.shape() != nc::Shape{2}) {
    throw nc::ShapeError("loss: prediction must have shape [2], got " +
                         nc::shape_string(pred.shape()));
  }
  nc::Tape& tape = pred.tape();
  const Var err = nc::sub(pred, tape.constant(nc::Tensor::vector({gt.dp, gt.dphi})));
  const Var w = tape.constant(nc::Tensor::vector({weight, weight * alpha}));
  return nc::sum(nc::mul(nc::mul(err, err), w));
}

Var pose_loss(std::span<const Var> preds, std::span<const PoseIncrement> gts,
              double alpha) {
  check_batch(preds.size(), gts.size());
  const double w = 1.0 / static_cast<double>(preds.size());
  Var total = sample_loss(preds[0], gts[0], alpha, w);
  for (std::size_t i = 1; i < preds.size(); ++i) {
    total = nc::add(total, sample_loss(preds[i], gts[i], alpha, w));
  }
  return total;
}

}  // namespace quadvo::train
