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

#ifndef QUADVO_NUMCORE_TAPE_H_
#define QUADVO_NUMCORE_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "quadvo/numcore/tensor.h"

namespace quadvo::numcore {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records forward operations in execution order and replays their backward
/// rules in reverse. Execution order is a topological order, so the reverse
/// walk visits every consumer before its producers.
///
/// A tape is single-threaded. Parameters are referenced, not copied, so they
/// must outlive the tape and must not be updated while it is in use.
class Tape {
 public:
  /// Backward rule: reads the node's output gradient and accumulates into
  /// the gradients of its inputs.
  using BackwardFn = std::function<void(Tape&, std::size_t node)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);
  Var parameter(Parameter& param);

  /// Appends an operation node. `backward` is kept only if some input
  /// requires a gradient.
  Var record(std::string op, Tensor value, std::vector<Var> inputs,
             BackwardFn backward);

  /// Reverse-mode sweep from a scalar `loss`. Node gradients are reset
  /// first, so repeated calls are idempotent. Parameter gradients are
  /// *accumulated* into Parameter::grad.
  void backward(Var loss);

  const Tensor& value(std::size_t node) const;
  const Tensor& grad(std::size_t node) const { return nodes_[node].grad; }
  Tensor& mutable_grad(std::size_t node) { return nodes_[node].grad; }
  bool requires_grad(std::size_t node) const {
    return nodes_[node].requires_grad;
  }
  const std::vector<std::size_t>& inputs(std::size_t node) const {
    return nodes_[node].inputs;
  }
  const std::string& op(std::size_t node) const { return nodes_[node].op; }
  std::size_t size() const { return nodes_.size(); }

  /// When enabled, non-smooth operations (relu, max reductions) fold their
  /// branch choices into `kink_signature()`. Finite-difference checks use it
  /// to detect perturbations that cross a kink.
  void set_track_kinks(bool on) { track_kinks_ = on; }
  bool track_kinks() const { return track_kinks_; }
  void note_kink(std::uint64_t value);
  std::uint64_t kink_signature() const { return kink_signature_; }

 private:
  struct Node {
    std::string op;
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    std::vector<std::size_t> inputs;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;  // deque keeps references stable on append
  bool track_kinks_ = false;
  std::uint64_t kink_signature_ = 1469598103934665603ULL;
};

}  // namespace quadvo::numcore

#endif  // QUADVO_NUMCORE_TAPE_H_
