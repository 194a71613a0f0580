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

#include "quadvo/numcore/tape.h"

#include <cmath>

namespace quadvo::numcore {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

const Tensor& Tape::value(std::size_t node) const {
  const Node& n = nodes_[node];
  return n.borrowed != nullptr ? *n.borrowed : n.owned;
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(Tensor value) {
  Node n;
  n.op = "variable";
  n.owned = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& param) {
  Node n;
  n.op = "parameter:" + param.name;
  n.borrowed = &param.value;
  n.requires_grad = true;
  n.param = &param;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(std::string op, Tensor value, std::vector<Var> inputs,
                 BackwardFn backward) {
  Node n;
  n.op = std::move(op);
  n.owned = std::move(value);
  n.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    if (&v.tape() != this) {
      throw std::invalid_argument("operation '" + n.op +
                                  "' mixes variables from different tapes");
    }
    n.inputs.push_back(v.id());
    n.requires_grad = n.requires_grad || nodes_[v.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Tape::note_kink(std::uint64_t value) {
  // FNV-1a style fold; only used for equality comparisons.
  kink_signature_ ^= value + 0x9e3779b97f4a7c15ULL;
  kink_signature_ *= 1099511628211ULL;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) {
    throw std::invalid_argument("backward: loss belongs to another tape");
  }
  if (value(loss.id()).size() != 1) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     shape_string(value(loss.id()).shape()));
  }
  for (std::size_t i = 0; i <= loss.id(); ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad) {
      const Shape& s = value(i).shape();
      if (n.grad.shape() != s) {
        n.grad = Tensor(s, 0.0);
      } else {
        n.grad.fill(0.0);
      }
    }
  }
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad.fill(1.0);

  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward) continue;
    n.backward(*this, i);
    for (std::size_t in : n.inputs) {
      if (nodes_[in].requires_grad && !nodes_[in].grad.all_finite()) {
        throw NumericError("non-finite gradient produced by backward of '" +
                           n.op + "'");
      }
    }
  }

  for (std::size_t i = 0; i <= loss.id(); ++i) {
    Node& n = nodes_[i];
    if (n.param == nullptr) continue;
    Parameter& p = *n.param;
    if (p.grad.shape() != p.value.shape()) p.zero_grad();
    auto dst = p.grad.data();
    auto src = n.grad.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  }
}

}  // namespace quadvo::numcore
