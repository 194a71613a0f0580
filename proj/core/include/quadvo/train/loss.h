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

#ifndef QUADVO_TRAIN_LOSS_H_
#define QUADVO_TRAIN_LOSS_H_

#include <span>

#include "quadvo/geometry/pose.h"
#include "quadvo/numcore/tape.h"

namespace quadvo::train {

using geometry::PoseIncrement;
using numcore::Var;

/// (1/N) sum_i (dp_hat_i - dp_i)^2 + alpha (dphi_hat_i - dphi_i)^2.
/// Throws std::invalid_argument for empty or unequal batches.
double pose_loss(std::span<const PoseIncrement> preds, std::span<const PoseIncrement> gts,
                 double alpha);

/// weight * ((pred[0] - dp)^2 + alpha (pred[1] - dphi)^2) for a length-2
/// prediction. With weight 1/N and one tape per sample, the accumulated
/// parameter gradients equal those of the batch loss.
Var sample_loss(Var pred, const PoseIncrement& gt, double alpha, double weight);

/// The batch loss on one tape.
Var pose_loss(std::span<const Var> preds, std::span<const PoseIncrement> gts,
              double alpha);

}  // namespace quadvo::train

#endif  // QUADVO_TRAIN_LOSS_H_
