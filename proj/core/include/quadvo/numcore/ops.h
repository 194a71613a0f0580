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

#ifndef QUADVO_NUMCORE_OPS_H_
#define QUADVO_NUMCORE_OPS_H_

#include <cstddef>
#include <span>

#include "quadvo/numcore/tape.h"
#include "quadvo/numcore/tensor.h"

namespace quadvo::numcore {

enum class PoolKind { kAverage, kMax };

/// Output extent of a strided window over `in + 2*pad` cells.
std::size_t window_output_size(std::size_t in, std::size_t k,
                               std::size_t stride, std::size_t pad);

/// Cross-correlation (no kernel flip) of a zero-padded C x H x W input with
/// O x C x Kh x Kw kernels plus a length-O bias.
Var conv2d(Var input, Var kernels, Var bias, std::size_t stride,
           std::size_t zero_pad);

/// Average pooling counts padded cells as zeros (divides by k*k); max
/// pooling ignores padded cells. Gradient ties route to the row-major first
/// maximum.
Var pool2d(Var input, PoolKind kind, std::size_t k, std::size_t stride,
           std::size_t zero_pad);

/// weights (m x n) * input (n) + bias (m).
Var dense(Var input, Var weights, Var bias);

Var sigmoid(Var x);
Var relu(Var x);

/// Elementwise binary ops. Operands must have equal rank; along each axis
/// the sizes must match or one of them must be 1 (broadcast).
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);

Var scale(Var x, double factor);
Var sum(Var x);

/// Concatenation along `axis`; all other extents must match.
Var concat(std::span<const Var> parts, std::size_t axis);
Var concat(Var a, Var b, std::size_t axis);

Var reshape(Var x, Shape shape);
Var flatten(Var x);

/// Mean or max over one axis, keeping it with extent 1.
Var reduce(Var x, std::size_t axis, PoolKind kind);

/// Per-channel standardisation of a C x H x W map over its spatial extent,
/// followed by a learned per-channel scale and shift.
Var channel_norm(Var x, Var gamma, Var beta, double epsilon = 1e-5);

/// Numerically safe logistic function, clamped strictly inside (0, 1).
double sigmoid_value(double x);

}  // namespace quadvo::numcore

#endif  // QUADVO_NUMCORE_OPS_H_
