/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::model {

using Vector = std::vector<double>;

// One pipeline stage of the toy MLP. `matrix` is row-major d_out x d_in.
// Gradients use the same shape.
struct LayerWeights {
  std::size_t layer_index = 0;
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  Vector matrix;
  Vector bias;
  // Reserved segment; plain SGD keeps it empty.
  Vector optimizer_state;

  static LayerWeights Zeros(std::size_t layer_index, std::size_t d_in, std::size_t d_out) {
    return LayerWeights{layer_index, d_in, d_out, Vector(d_in * d_out, 0.0),
                        Vector(d_out, 0.0), {}};
  }

  double& at(std::size_t row, std::size_t col) { return matrix[row * d_in + col]; }
  double at(std::size_t row, std::size_t col) const { return matrix[row * d_in + col]; }

  std::size_t ParameterCount() const {
    return matrix.size() + bias.size() + optimizer_state.size();
  }

  bool SameShape(const LayerWeights& other) const {
    return d_in == other.d_in && d_out == other.d_out &&
           optimizer_state.size() == other.optimizer_state.size();
  }

  friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

using LayerGrad = LayerWeights;
using Model = std::vector<LayerWeights>;

struct BackwardResult {
  Vector input_grad;
  LayerGrad weight_grad;
};

struct LossResult {
  double loss = 0.0;
  Vector grad;
};

namespace detail {
inline void CheckLength(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    Fail(ErrorKind::kShapeError, std::string(what) + ": expected length " +
                                     std::to_string(want) + ", got " + std::to_string(got));
  }
}
}  // namespace detail

// Entries and biases are drawn from U(-1/sqrt(d_in), 1/sqrt(d_in)).
inline Model InitModel(std::uint64_t seed, std::span<const std::size_t> dims) {
  Require(dims.size() >= 2, ErrorKind::kInvalidConfig, "need at least two layer sizes");
  for (std::size_t d : dims) {
    Require(d >= 1, ErrorKind::kInvalidConfig, "layer sizes must be >= 1");
  }
  kernel::RngStream root(seed, "model/init");
  Model model;
  model.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    kernel::RngStream rng = root.Fork("layer/" + std::to_string(l));
    LayerWeights w = LayerWeights::Zeros(l, dims[l], dims[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    for (double& v : w.matrix) v = rng.Uniform(-bound, bound);
    for (double& v : w.bias) v = rng.Uniform(-bound, bound);
    model.push_back(std::move(w));
  }
  return model;
}

// Hidden layers: tanh(Wx + b). Output layer: Wx + b.
inline Vector LayerForward(const LayerWeights& w, std::span<const double> x, bool is_last) {
  detail::CheckLength(x.size(), w.d_in, "layer input");
  Vector out(w.d_out);
  for (std::size_t r = 0; r < w.d_out; ++r) {
    double z = w.bias[r];
    const double* row = &w.matrix[r * w.d_in];
    for (std::size_t c = 0; c < w.d_in; ++c) z += row[c] * x[c];
    out[r] = is_last ? z : std::tanh(z);
  }
  return out;
}

inline BackwardResult LayerBackward(const LayerWeights& w, std::span<const double> cached_x,
                                    std::span<const double> upstream, bool is_last) {
  detail::CheckLength(cached_x.size(), w.d_in, "cached input");
  detail::CheckLength(upstream.size(), w.d_out, "upstream gradient");
  Vector dz(w.d_out);
  if (is_last) {
    dz.assign(upstream.begin(), upstream.end());
  } else {
    const Vector a = LayerForward(w, cached_x, false);
    for (std::size_t r = 0; r < w.d_out; ++r) dz[r] = upstream[r] * (1.0 - a[r] * a[r]);
  }
  BackwardResult result{Vector(w.d_in, 0.0),
                        LayerWeights::Zeros(w.layer_index, w.d_in, w.d_out)};
  result.weight_grad.optimizer_state.assign(w.optimizer_state.size(), 0.0);
  for (std::size_t r = 0; r < w.d_out; ++r) {
    const double* row = &w.matrix[r * w.d_in];
    double* grow = &result.weight_grad.matrix[r * w.d_in];
    for (std::size_t c = 0; c < w.d_in; ++c) {
      grow[c] = dz[r] * cached_x[c];
      result.input_grad[c] += row[c] * dz[r];
    }
    result.weight_grad.bias[r] = dz[r];
  }
  return result;
}

// Mean squared error over the vector and its gradient 2(pred - target)/n.
inline LossResult ComputeLoss(std::span<const double> pred, std::span<const double> target) {
  detail::CheckLength(target.size(), pred.size(), "loss target");
  Require(!pred.empty(), ErrorKind::kShapeError, "empty prediction");
  const double n = static_cast<double>(pred.size());
  LossResult out{0.0, Vector(pred.size())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = 2.0 * d / n;
  }
  out.loss /= n;
  return out;
}

inline void AccumulateGrad(LayerGrad& into, const LayerGrad& g, double scale = 1.0) {
  Require(into.SameShape(g), ErrorKind::kShapeError, "gradient shape mismatch");
  for (std::size_t i = 0; i < into.matrix.size(); ++i) into.matrix[i] += scale * g.matrix[i];
  for (std::size_t i = 0; i < into.bias.size(); ++i) into.bias[i] += scale * g.bias[i];
  for (std::size_t i = 0; i < into.optimizer_state.size(); ++i) {
    into.optimizer_state[i] += scale * g.optimizer_state[i];
  }
}

// w' = w - lr * grad. The optimizer segment is carried unchanged.
inline LayerWeights ApplyUpdate(const LayerWeights& w, const LayerGrad& grad, double lr) {
  Require(w.SameShape(grad), ErrorKind::kShapeError, "update shape mismatch");
  LayerWeights out = w;
  for (std::size_t i = 0; i < out.matrix.size(); ++i) out.matrix[i] -= lr * grad.matrix[i];
  for (std::size_t i = 0; i < out.bias.size(); ++i) out.bias[i] -= lr * grad.bias[i];
  return out;
}

// Flat payload order: matrix (row-major), bias, optimizer segment.
inline Vector Flatten(const LayerWeights& w) {
  Vector flat;
  flat.reserve(w.ParameterCount());
  flat.insert(flat.end(), w.matrix.begin(), w.matrix.end());
  flat.insert(flat.end(), w.bias.begin(), w.bias.end());
  flat.insert(flat.end(), w.optimizer_state.begin(), w.optimizer_state.end());
  return flat;
}

inline LayerWeights Unflatten(const LayerWeights& shape, std::span<const double> flat) {
  detail::CheckLength(flat.size(), shape.ParameterCount(), "flat payload");
  LayerWeights w = shape;
  auto it = flat.begin();
  std::copy(it, it + static_cast<std::ptrdiff_t>(w.matrix.size()), w.matrix.begin());
  it += static_cast<std::ptrdiff_t>(w.matrix.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(w.bias.size()), w.bias.begin());
  it += static_cast<std::ptrdiff_t>(w.bias.size());
  std::copy(it, flat.end(), w.optimizer_state.begin());
  return w;
}

// ---- micro-batch helpers shared by the pipeline miners and the reference trainer

using Rows = std::vector<Vector>;

inline Rows ForwardBatch(const LayerWeights& w, const Rows& xs, bool is_last) {
  Rows out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(LayerForward(w, x, is_last));
  return out;
}

struct BatchBackward {
  Rows input_grads;
  LayerGrad weight_grad;
};

// Weight gradient is summed over rows; callers fold the 1/batch factor into
// the upstream gradient (see BatchLoss).
inline BatchBackward BackwardBatch(const LayerWeights& w, const Rows& cached_xs,
                                   const Rows& upstream, bool is_last) {
  detail::CheckLength(upstream.size(), cached_xs.size(), "batch upstream rows");
  BatchBackward out{{}, LayerWeights::Zeros(w.layer_index, w.d_in, w.d_out)};
  out.weight_grad.optimizer_state.assign(w.optimizer_state.size(), 0.0);
  out.input_grads.reserve(cached_xs.size());
  for (std::size_t i = 0; i < cached_xs.size(); ++i) {
    BackwardResult r = LayerBackward(w, cached_xs[i], upstream[i], is_last);
    AccumulateGrad(out.weight_grad, r.weight_grad);
    out.input_grads.push_back(std::move(r.input_grad));
  }
  return out;
}

struct BatchLossResult {
  double loss = 0.0;
  Rows grads;
};

// Mean of per-row MSE; row gradients already carry the 1/batch factor.
inline BatchLossResult BatchLoss(const Rows& preds, const Rows& targets) {
  detail::CheckLength(targets.size(), preds.size(), "batch targets");
  Require(!preds.empty(), ErrorKind::kShapeError, "empty batch");
  const double inv = 1.0 / static_cast<double>(preds.size());
  BatchLossResult out;
  out.grads.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    LossResult r = ComputeLoss(preds[i], targets[i]);
    out.loss += r.loss;
    for (double& g : r.grad) g *= inv;
    out.grads.push_back(std::move(r.grad));
  }
  out.loss *= inv;
  return out;
}

inline Vector Concat(const Rows& rows) {
  Vector flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

inline Rows Split(std::span<const double> flat, std::size_t width) {
  Require(width > 0 && flat.size() % width == 0, ErrorKind::kShapeError,
          "activation length is not a multiple of the row width");
  Rows rows(flat.size() / width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * width),
                   flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
  }
  return rows;
}

}  // namespace iota::model
