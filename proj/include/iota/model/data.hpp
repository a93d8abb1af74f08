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
#include <string>

#include "iota/error.hpp"
#include "iota/kernel/rng.hpp"
#include "iota/model/mlp.hpp"

namespace iota::model {

struct Batch {
  std::uint64_t batch_id = 0;
  Rows inputs;
  Rows targets;
};

// Synthetic regression task y = A x + noise. Batches are random-access: batch
// `id` is a pure function of (seed, id), so any participant can regenerate it.
class DataStream {
 public:
  DataStream(std::uint64_t seed, std::size_t d_in, std::size_t d_out,
             std::size_t micro_batch, double noise)
      : root_(seed, "data"), d_in_(d_in), d_out_(d_out), micro_batch_(micro_batch),
        noise_(noise) {
    Require(d_in >= 1 && d_out >= 1, ErrorKind::kInvalidConfig, "data dims must be >= 1");
    Require(micro_batch >= 1, ErrorKind::kInvalidConfig, "micro_batch must be >= 1");
    Require(noise >= 0.0, ErrorKind::kInvalidConfig, "noise must be >= 0");
    kernel::RngStream rng = root_.Fork("task");
    task_.resize(d_out * d_in);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_in));
    for (double& a : task_) a = rng.Normal(0.0, scale);
  }

  std::size_t micro_batch() const { return micro_batch_; }
  std::size_t d_in() const { return d_in_; }
  std::size_t d_out() const { return d_out_; }

  Batch Get(std::uint64_t batch_id) const {
    kernel::RngStream rng = root_.Fork("batch/" + std::to_string(batch_id));
    Batch b{batch_id, {}, {}};
    b.inputs.reserve(micro_batch_);
    b.targets.reserve(micro_batch_);
    for (std::size_t i = 0; i < micro_batch_; ++i) {
      Vector x(d_in_);
      for (double& v : x) v = rng.Uniform(-1.0, 1.0);
      Vector y(d_out_);
      for (std::size_t r = 0; r < d_out_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d_in_; ++c) acc += task_[r * d_in_ + c] * x[c];
        y[r] = acc + noise_ * rng.Normal();
      }
      b.inputs.push_back(std::move(x));
      b.targets.push_back(std::move(y));
    }
    return b;
  }

 private:
  kernel::RngStream root_;
  std::size_t d_in_;
  std::size_t d_out_;
  std::size_t micro_batch_;
  double noise_;
  Vector task_;
};

}  // namespace iota::model
