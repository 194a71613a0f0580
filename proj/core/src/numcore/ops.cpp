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

#include "quadvo/numcore/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace quadvo::numcore {

namespace {

// Output indices `o` for which o*stride + tap - pad lands in [0, in).
struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

Range valid_range(std::size_t tap, std::size_t pad, std::size_t stride,
                  std::size_t in, std::size_t out) {
  const long long need = static_cast<long long>(pad) -
                         static_cast<long long>(tap);  // o*stride >= need
  const long long limit = static_cast<long long>(in) - 1 +
                          static_cast<long long>(pad) -
                          static_cast<long long>(tap);  // o*stride <= limit
  const auto s = static_cast<long long>(stride);
  Range r;
  r.lo = need <= 0 ? 0 : static_cast<std::size_t>((need + s - 1) / s);
  r.hi = limit < 0 ? 0
                   : std::min<std::size_t>(out,
                                           static_cast<std::size_t>(limit / s) + 1);
  if (r.lo > r.hi) r.lo = r.hi;
  return r;
}

void require_rank(const char* op, const char* what, const Tensor& t,
                  std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": " + what + " must have rank " +
                     std::to_string(rank) + ", got shape " +
                     shape_string(t.shape()));
  }
}

// Multi-index walker over a broadcast pair. Calls f(out, ia, ib) for each
// output element in row-major order.
template <typename F>
void for_each_broadcast(const Shape& out, const Shape& sa, const Shape& sb,
                        F&& f) {
  const std::size_t rank = out.size();
  std::vector<std::size_t> stride_a(rank), stride_b(rank);
  std::size_t acc_a = 1, acc_b = 1;
  for (std::size_t d = rank; d-- > 0;) {
    stride_a[d] = sa[d] == 1 ? 0 : acc_a;
    stride_b[d] = sb[d] == 1 ? 0 : acc_b;
    acc_a *= sa[d];
    acc_b *= sb[d];
  }
  std::vector<std::size_t> idx(rank, 0);
  std::size_t ia = 0, ib = 0;
  const std::size_t total = shape_size(out);
  for (std::size_t i = 0; i < total; ++i) {
    f(i, ia, ib);
    for (std::size_t d = rank; d-- > 0;) {
      ++idx[d];
      ia += stride_a[d];
      ib += stride_b[d];
      if (idx[d] < out[d]) break;
      ia -= stride_a[d] * out[d];
      ib -= stride_b[d] * out[d];
      idx[d] = 0;
    }
  }
}

Shape broadcast_shape(const char* op, const Shape& a, const Shape& b) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": operands " + shape_string(a) +
                     " and " + shape_string(b) + " have different ranks");
  }
  Shape out(a.size());
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] == b[d] || b[d] == 1) {
      out[d] = a[d];
    } else if (a[d] == 1) {
      out[d] = b[d];
    } else {
      throw ShapeError(std::string(op) + ": shapes " + shape_string(a) +
                       " and " + shape_string(b) + " are not broadcastable");
    }
  }
  return out;
}

enum class BinaryKind { kAdd, kSub, kMul };

Var binary(const char* op, BinaryKind kind, Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const Shape out_shape = broadcast_shape(op, av.shape(), bv.shape());
  Tensor y(out_shape);
  auto yd = y.data();
  auto ad = av.data();
  auto bd = bv.data();
  const bool same = av.shape() == bv.shape();
  auto apply = [&](std::size_t i, std::size_t ia, std::size_t ib) {
    switch (kind) {
      case BinaryKind::kAdd: yd[i] = ad[ia] + bd[ib]; break;
      case BinaryKind::kSub: yd[i] = ad[ia] - bd[ib]; break;
      case BinaryKind::kMul: yd[i] = ad[ia] * bd[ib]; break;
    }
  };
  if (same) {
    for (std::size_t i = 0; i < yd.size(); ++i) apply(i, i, i);
  } else {
    for_each_broadcast(out_shape, av.shape(), bv.shape(), apply);
  }

  const std::size_t ida = a.id();
  const std::size_t idb = b.id();
  return a.tape().record(
      op, std::move(y), {a, b},
      [ida, idb, kind, same](Tape& t, std::size_t self) {
        const auto gy = t.grad(self).data();
        const bool need_a = t.requires_grad(ida);
        const bool need_b = t.requires_grad(idb);
        const auto av = t.value(ida).data();
        const auto bv = t.value(idb).data();
        // Copies guard against a == b, where both alias one gradient buffer.
        Tensor ga_local, gb_local;
        if (need_a) ga_local = Tensor(t.value(ida).shape(), 0.0);
        if (need_b) gb_local = Tensor(t.value(idb).shape(), 0.0);
        auto ga = ga_local.data();
        auto gb = gb_local.data();
        auto step = [&](std::size_t i, std::size_t ia, std::size_t ib) {
          const double g = gy[i];
          switch (kind) {
            case BinaryKind::kAdd:
              if (need_a) ga[ia] += g;
              if (need_b) gb[ib] += g;
              break;
            case BinaryKind::kSub:
              if (need_a) ga[ia] += g;
              if (need_b) gb[ib] -= g;
              break;
            case BinaryKind::kMul:
              if (need_a) ga[ia] += g * bv[ib];
              if (need_b) gb[ib] += g * av[ia];
              break;
          }
        };
        if (same) {
          for (std::size_t i = 0; i < gy.size(); ++i) step(i, i, i);
        } else {
          for_each_broadcast(t.value(self).shape(), t.value(ida).shape(),
                             t.value(idb).shape(), step);
        }
        if (need_a) {
          auto dst = t.mutable_grad(ida).data();
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += ga[k];
        }
        if (need_b) {
          auto dst = t.mutable_grad(idb).data();
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += gb[k];
        }
      });
}

}  // namespace

std::size_t window_output_size(std::size_t in, std::size_t k,
                               std::size_t stride, std::size_t pad) {
  if (k == 0 || stride == 0) {
    throw std::invalid_argument("window size and stride must be positive");
  }
  if (in + 2 * pad < k) {
    throw ShapeError("window of size " + std::to_string(k) +
                     " does not fit input extent " + std::to_string(in) +
                     " with padding " + std::to_string(pad));
  }
  return (in + 2 * pad - k) / stride + 1;
}

double sigmoid_value(double x) {
  constexpr double kLo = std::numeric_limits<double>::min();
  const double kHi = std::nextafter(1.0, 0.0);
  double y;
  if (x >= 0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, kLo, kHi);
}

Var conv2d(Var input, Var kernels, Var bias, std::size_t stride,
           std::size_t zero_pad) {
  const Tensor& x = input.value();
  const Tensor& w = kernels.value();
  const Tensor& b = bias.value();
  require_rank("conv2d", "input", x, 3);
  require_rank("conv2d", "kernels", w, 4);
  require_rank("conv2d", "bias", b, 1);
  if (w.dim(1) != x.dim(0)) {
    throw ShapeError("conv2d: input has " + std::to_string(x.dim(0)) +
                     " channels but kernels " + shape_string(w.shape()) +
                     " expect " + std::to_string(w.dim(1)));
  }
  if (b.dim(0) != w.dim(0)) {
    throw ShapeError("conv2d: bias " + shape_string(b.shape()) +
                     " does not match " + std::to_string(w.dim(0)) +
                     " output channels");
  }
  if (stride == 0) throw std::invalid_argument("conv2d: stride must be positive");
  const std::size_t c_in = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const std::size_t c_out = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (h + 2 * zero_pad < kh || wd + 2 * zero_pad < kw) {
    throw ShapeError("conv2d: kernel " + shape_string(w.shape()) +
                     " larger than padded input " + shape_string(x.shape()));
  }
  const std::size_t ho = window_output_size(h, kh, stride, zero_pad);
  const std::size_t wo = window_output_size(wd, kw, stride, zero_pad);

  Tensor y({c_out, ho, wo});
  for (std::size_t o = 0; o < c_out; ++o) {
    double* yo = &y.at(o, 0, 0);
    std::fill(yo, yo + ho * wo, b[o]);
  }
  const double* xd = x.data().data();
  const double* wdat = w.data().data();
  double* yd = y.data().data();
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t c = 0; c < c_in; ++c) {
      for (std::size_t i = 0; i < kh; ++i) {
        const Range rh = valid_range(i, zero_pad, stride, h, ho);
        for (std::size_t j = 0; j < kw; ++j) {
          const Range rw = valid_range(j, zero_pad, stride, wd, wo);
          const double wv = wdat[((o * c_in + c) * kh + i) * kw + j];
          for (std::size_t oh = rh.lo; oh < rh.hi; ++oh) {
            const double* xr = xd + (c * h + (oh * stride + i - zero_pad)) * wd;
            double* yr = yd + (o * ho + oh) * wo;
            for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) {
              yr[ow] += wv * xr[ow * stride + j - zero_pad];
            }
          }
        }
      }
    }
  }

  const std::size_t idx = input.id(), idw = kernels.id(), idb = bias.id();
  return input.tape().record(
      "conv2d", std::move(y), {input, kernels, bias},
      [=](Tape& t, std::size_t self) {
        const double* gy = t.grad(self).data().data();
        const double* xv = t.value(idx).data().data();
        const double* wv = t.value(idw).data().data();
        double* gx = t.requires_grad(idx) ? t.mutable_grad(idx).data().data()
                                          : nullptr;
        double* gw = t.requires_grad(idw) ? t.mutable_grad(idw).data().data()
                                          : nullptr;
        double* gb = t.requires_grad(idb) ? t.mutable_grad(idb).data().data()
                                          : nullptr;
        if (gb != nullptr) {
          for (std::size_t o = 0; o < c_out; ++o) {
            double s = 0.0;
            const double* g = gy + o * ho * wo;
            for (std::size_t k = 0; k < ho * wo; ++k) s += g[k];
            gb[o] += s;
          }
        }
        for (std::size_t o = 0; o < c_out; ++o) {
          for (std::size_t c = 0; c < c_in; ++c) {
            for (std::size_t i = 0; i < kh; ++i) {
              const Range rh = valid_range(i, zero_pad, stride, h, ho);
              for (std::size_t j = 0; j < kw; ++j) {
                const Range rw = valid_range(j, zero_pad, stride, wd, wo);
                const std::size_t wi = ((o * c_in + c) * kh + i) * kw + j;
                const double w_ij = wv[wi];
                double acc = 0.0;
                for (std::size_t oh = rh.lo; oh < rh.hi; ++oh) {
                  const std::size_t row = (c * h + (oh * stride + i - zero_pad)) * wd;
                  const double* gr = gy + (o * ho + oh) * wo;
                  if (gw != nullptr) {
                    const double* xr = xv + row;
                    for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) {
                      acc += gr[ow] * xr[ow * stride + j - zero_pad];
                    }
                  }
                  if (gx != nullptr) {
                    double* gxr = gx + row;
                    for (std::size_t ow = rw.lo; ow < rw.hi; ++ow) {
                      gxr[ow * stride + j - zero_pad] += w_ij * gr[ow];
                    }
                  }
                }
                if (gw != nullptr) gw[wi] += acc;
              }
            }
          }
        }
      });
}

Var pool2d(Var input, PoolKind kind, std::size_t k, std::size_t stride,
           std::size_t zero_pad) {
  if (k == 0 || stride == 0) {
    throw std::invalid_argument("pool2d: window size and stride must be positive");
  }
  const Tensor& x = input.value();
  require_rank("pool2d", "input", x, 3);
  const std::size_t c_n = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t ho = window_output_size(h, k, stride, zero_pad);
  const std::size_t wo = window_output_size(w, k, stride, zero_pad);
  Tensor y({c_n, ho, wo});
  std::vector<std::size_t> argmax;
  if (kind == PoolKind::kMax) argmax.assign(y.size(), 0);
  const double inv_area = 1.0 / static_cast<double>(k * k);
  Tape& tape = input.tape();

  for (std::size_t c = 0; c < c_n; ++c) {
    for (std::size_t oh = 0; oh < ho; ++oh) {
      const long long h0 = static_cast<long long>(oh * stride) -
                           static_cast<long long>(zero_pad);
      const std::size_t r0 = static_cast<std::size_t>(std::max(0LL, h0));
      const std::size_t r1 = static_cast<std::size_t>(
          std::min<long long>(static_cast<long long>(h), h0 + static_cast<long long>(k)));
      for (std::size_t ow = 0; ow < wo; ++ow) {
        const long long w0 = static_cast<long long>(ow * stride) -
                             static_cast<long long>(zero_pad);
        const std::size_t q0 = static_cast<std::size_t>(std::max(0LL, w0));
        const std::size_t q1 = static_cast<std::size_t>(
            std::min<long long>(static_cast<long long>(w), w0 + static_cast<long long>(k)));
        const std::size_t out = (c * ho + oh) * wo + ow;
        if (kind == PoolKind::kAverage) {
          double s = 0.0;
          for (std::size_t r = r0; r < r1; ++r) {
            for (std::size_t q = q0; q < q1; ++q) s += x.at(c, r, q);
          }
          y[out] = s * inv_area;
        } else {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_i = 0;
          bool any = false;
          for (std::size_t r = r0; r < r1; ++r) {
            for (std::size_t q = q0; q < q1; ++q) {
              const double v = x.at(c, r, q);
              if (!any || v > best) {
                best = v;
                best_i = (c * h + r) * w + q;
                any = true;
              }
            }
          }
          y[out] = any ? best : 0.0;
          argmax[out] = any ? best_i : std::numeric_limits<std::size_t>::max();
          if (tape.track_kinks()) tape.note_kink(best_i);
        }
      }
    }
  }

  const std::size_t idx = input.id();
  return tape.record(
      kind == PoolKind::kMax ? "max_pool2d" : "avg_pool2d", std::move(y),
      {input},
      [=, argmax = std::move(argmax)](Tape& t, std::size_t self) {
        const auto gy = t.grad(self).data();
        auto gx = t.mutable_grad(idx).data();
        if (kind == PoolKind::kMax) {
          for (std::size_t i = 0; i < gy.size(); ++i) {
            if (argmax[i] != std::numeric_limits<std::size_t>::max()) {
              gx[argmax[i]] += gy[i];
            }
          }
          return;
        }
        for (std::size_t c = 0; c < c_n; ++c) {
          for (std::size_t oh = 0; oh < ho; ++oh) {
            const long long h0 = static_cast<long long>(oh * stride) -
                                 static_cast<long long>(zero_pad);
            const std::size_t r0 = static_cast<std::size_t>(std::max(0LL, h0));
            const std::size_t r1 = static_cast<std::size_t>(std::min<long long>(
                static_cast<long long>(h), h0 + static_cast<long long>(k)));
            for (std::size_t ow = 0; ow < wo; ++ow) {
              const long long w0 = static_cast<long long>(ow * stride) -
                                   static_cast<long long>(zero_pad);
              const std::size_t q0 = static_cast<std::size_t>(std::max(0LL, w0));
              const std::size_t q1 = static_cast<std::size_t>(std::min<long long>(
                  static_cast<long long>(w), w0 + static_cast<long long>(k)));
              const double g = gy[(c * ho + oh) * wo + ow] * inv_area;
              for (std::size_t r = r0; r < r1; ++r) {
                for (std::size_t q = q0; q < q1; ++q) gx[(c * h + r) * w + q] += g;
              }
            }
          }
        }
      });
}

Var dense(Var input, Var weights, Var bias) {
  const Tensor& x = input.value();
  const Tensor& w = weights.value();
  const Tensor& b = bias.value();
  require_rank("dense", "input", x, 1);
  require_rank("dense", "weights", w, 2);
  require_rank("dense", "bias", b, 1);
  const std::size_t m = w.dim(0), n = w.dim(1);
  if (x.dim(0) != n) {
    throw ShapeError("dense: input length " + std::to_string(x.dim(0)) +
                     " does not match weights " + shape_string(w.shape()));
  }
  if (b.dim(0) != m) {
    throw ShapeError("dense: bias " + shape_string(b.shape()) +
                     " does not match weights " + shape_string(w.shape()));
  }
  Tensor y({m});
  const double* xd = x.data().data();
  const double* wd = w.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = wd + i * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * xd[j];
    y[i] = s + b[i];
  }
  const std::size_t idx = input.id(), idw = weights.id(), idb = bias.id();
  return input.tape().record(
      "dense", std::move(y), {input, weights, bias},
      [=](Tape& t, std::size_t self) {
        const double* gy = t.grad(self).data().data();
        const double* xv = t.value(idx).data().data();
        const double* wv = t.value(idw).data().data();
        if (t.requires_grad(idb)) {
          double* gb = t.mutable_grad(idb).data().data();
          for (std::size_t i = 0; i < m; ++i) gb[i] += gy[i];
        }
        if (t.requires_grad(idw)) {
          double* gw = t.mutable_grad(idw).data().data();
          for (std::size_t i = 0; i < m; ++i) {
            const double g = gy[i];
            if (g == 0.0) continue;
            double* row = gw + i * n;
            for (std::size_t j = 0; j < n; ++j) row[j] += g * xv[j];
          }
        }
        if (t.requires_grad(idx)) {
          double* gx = t.mutable_grad(idx).data().data();
          for (std::size_t i = 0; i < m; ++i) {
            const double g = gy[i];
            if (g == 0.0) continue;
            const double* row = wv + i * n;
            for (std::size_t j = 0; j < n; ++j) gx[j] += g * row[j];
          }
        }
      });
}

Var sigmoid(Var x) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = sigmoid_value(xv[i]);
  const std::size_t idx = x.id();
  return x.tape().record("sigmoid", std::move(y), {x},
                         [idx](Tape& t, std::size_t self) {
                           const auto gy = t.grad(self).data();
                           const auto yv = t.value(self).data();
                           auto gx = t.mutable_grad(idx).data();
                           for (std::size_t i = 0; i < gy.size(); ++i) {
                             gx[i] += gy[i] * yv[i] * (1.0 - yv[i]);
                           }
                         });
}

Var relu(Var x) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  Tape& tape = x.tape();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = xv[i] > 0.0 ? xv[i] : 0.0;
    if (tape.track_kinks() && xv[i] > 0.0) tape.note_kink(i);
  }
  const std::size_t idx = x.id();
  return tape.record("relu", std::move(y), {x},
                     [idx](Tape& t, std::size_t self) {
                       const auto gy = t.grad(self).data();
                       const auto xv = t.value(idx).data();
                       auto gx = t.mutable_grad(idx).data();
                       for (std::size_t i = 0; i < gy.size(); ++i) {
                         if (xv[i] > 0.0) gx[i] += gy[i];
                       }
                     });
}

Var add(Var a, Var b) { return binary("add", BinaryKind::kAdd, a, b); }
Var sub(Var a, Var b) { return binary("sub", BinaryKind::kSub, a, b); }
Var mul(Var a, Var b) { return binary("mul", BinaryKind::kMul, a, b); }

Var scale(Var x, double factor) {
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * factor;
  const std::size_t idx = x.id();
  return x.tape().record("scale", std::move(y), {x},
                         [idx, factor](Tape& t, std::size_t self) {
                           const auto gy = t.grad(self).data();
                           auto gx = t.mutable_grad(idx).data();
                           for (std::size_t i = 0; i < gy.size(); ++i) {
                             gx[i] += gy[i] * factor;
                           }
                         });
}

Var sum(Var x) {
  const std::size_t idx = x.id();
  return x.tape().record("sum", Tensor::scalar(x.value().sum()), {x},
                         [idx](Tape& t, std::size_t self) {
                           const double g = t.grad(self)[0];
                           auto gx = t.mutable_grad(idx).data();
                           for (double& v : gx) v += g;
                         });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat: no operands");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_string(first));
  }
  Shape out = first;
  out[axis] = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) ok = false;
    }
    if (!ok) {
      throw ShapeError("concat: shape " + shape_string(s) +
                       " incompatible with " + shape_string(first) +
                       " along axis " + std::to_string(axis));
    }
    out[axis] += s[axis];
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];

  Tensor y(out);
  std::vector<std::size_t> ids, chunk;
  std::vector<Var> inputs(parts.begin(), parts.end());
  const std::size_t out_chunk = out[axis] * inner;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const std::size_t ch = p.shape()[axis] * inner;
    const auto src = p.value().data();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src.data() + o * ch, ch, y.data().data() + o * out_chunk + offset);
    }
    ids.push_back(p.id());
    chunk.push_back(ch);
    offset += ch;
  }
  return parts[0].tape().record(
      "concat", std::move(y), std::move(inputs),
      [ids, chunk, outer, out_chunk](Tape& t, std::size_t self) {
        const double* gy = t.grad(self).data().data();
        std::size_t off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (t.requires_grad(ids[k])) {
            double* gx = t.mutable_grad(ids[k]).data().data();
            for (std::size_t o = 0; o < outer; ++o) {
              const double* src = gy + o * out_chunk + off;
              double* dst = gx + o * chunk[k];
              for (std::size_t i = 0; i < chunk[k]; ++i) dst[i] += src[i];
            }
          }
          off += chunk[k];
        }
      });
}

Var concat(Var a, Var b, std::size_t axis) {
  const Var parts[] = {a, b};
  return concat(std::span<const Var>(parts), axis);
}

Var reshape(Var x, Shape shape) {
  Tensor y = x.value().reshaped(std::move(shape));
  const std::size_t idx = x.id();
  return x.tape().record("reshape", std::move(y), {x},
                         [idx](Tape& t, std::size_t self) {
                           const auto gy = t.grad(self).data();
                           auto gx = t.mutable_grad(idx).data();
                           for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
                         });
}

Var flatten(Var x) { return reshape(x, Shape{x.value().size()}); }

Var reduce(Var x, std::size_t axis, PoolKind kind) {
  const Tensor& xv = x.value();
  if (axis >= xv.rank()) {
    throw ShapeError("reduce: axis " + std::to_string(axis) +
                     " out of range for shape " + shape_string(xv.shape()));
  }
  std::size_t outer = 1, inner = 1;
  const std::size_t n = xv.dim(axis);
  for (std::size_t d = 0; d < axis; ++d) outer *= xv.dim(d);
  for (std::size_t d = axis + 1; d < xv.rank(); ++d) inner *= xv.dim(d);
  Shape out = xv.shape();
  out[axis] = 1;
  Tensor y(out);
  std::vector<std::size_t> argmax;
  if (kind == PoolKind::kMax) argmax.resize(y.size());
  Tape& tape = x.tape();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      const std::size_t out_i = o * inner + i;
      if (kind == PoolKind::kAverage) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += xv[base + j * inner];
        y[out_i] = s * inv_n;
      } else {
        std::size_t best = base;
        for (std::size_t j = 1; j < n; ++j) {
          if (xv[base + j * inner] > xv[best]) best = base + j * inner;
        }
        y[out_i] = xv[best];
        argmax[out_i] = best;
        if (tape.track_kinks()) tape.note_kink(best);
      }
    }
  }
  const std::size_t idx = x.id();
  return tape.record(
      kind == PoolKind::kMax ? "reduce_max" : "reduce_mean", std::move(y), {x},
      [=, argmax = std::move(argmax)](Tape& t, std::size_t self) {
        const auto gy = t.grad(self).data();
        auto gx = t.mutable_grad(idx).data();
        if (kind == PoolKind::kMax) {
          for (std::size_t i = 0; i < gy.size(); ++i) gx[argmax[i]] += gy[i];
          return;
        }
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t i = 0; i < inner; ++i) {
            const double g = gy[o * inner + i] * inv_n;
            const std::size_t base = o * n * inner + i;
            for (std::size_t j = 0; j < n; ++j) gx[base + j * inner] += g;
          }
        }
      });
}

Var channel_norm(Var x, Var gamma, Var beta, double epsilon) {
  const Tensor& xv = x.value();
  require_rank("channel_norm", "input", xv, 3);
  const std::size_t c_n = xv.dim(0);
  const std::size_t area = xv.dim(1) * xv.dim(2);
  if (gamma.value().shape() != Shape{c_n} || beta.value().shape() != Shape{c_n}) {
    throw ShapeError("channel_norm: scale/shift must have shape [" +
                     std::to_string(c_n) + "]");
  }
  Tensor y(xv.shape());
  Tensor xhat(xv.shape());
  std::vector<double> inv_std(c_n);
  const double* g = gamma.value().data().data();
  const double* b = beta.value().data().data();
  for (std::size_t c = 0; c < c_n; ++c) {
    const double* src = xv.data().data() + c * area;
    double mean = 0.0;
    for (std::size_t k = 0; k < area; ++k) mean += src[k];
    mean /= static_cast<double>(area);
    double var = 0.0;
    for (std::size_t k = 0; k < area; ++k) var += (src[k] - mean) * (src[k] - mean);
    var /= static_cast<double>(area);
    inv_std[c] = 1.0 / std::sqrt(var + epsilon);
    for (std::size_t k = 0; k < area; ++k) {
      const double h = (src[k] - mean) * inv_std[c];
      xhat[c * area + k] = h;
      y[c * area + k] = g[c] * h + b[c];
    }
  }
  const std::size_t idx = x.id(), idg = gamma.id(), idb = beta.id();
  return x.tape().record(
      "channel_norm", std::move(y), {x, gamma, beta},
      [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t,
                                                               std::size_t self) {
        const double* gy = t.grad(self).data().data();
        const double* gv = t.value(idg).data().data();
        const double n = static_cast<double>(area);
        for (std::size_t c = 0; c < c_n; ++c) {
          double gsum = 0.0, gxh = 0.0;
          for (std::size_t k = 0; k < area; ++k) {
            gsum += gy[c * area + k];
            gxh += gy[c * area + k] * xhat[c * area + k];
          }
          if (t.requires_grad(idb)) t.mutable_grad(idb)[c] += gsum;
          if (t.requires_grad(idg)) t.mutable_grad(idg)[c] += gxh;
          if (t.requires_grad(idx)) {
            double* gx = t.mutable_grad(idx).data().data() + c * area;
            const double f = gv[c] * inv_std[c];
            for (std::size_t k = 0; k < area; ++k) {
              gx[k] += f * (gy[c * area + k] - gsum / n - xhat[c * area + k] * gxh / n);
            }
          }
        }
      });
}

}  // namespace quadvo::numcore
