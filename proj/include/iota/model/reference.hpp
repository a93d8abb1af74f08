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

#include <cstdint>
#include <vector>

#include "iota/error.hpp"
#include "iota/model/data.hpp"
#include "iota/model/mlp.hpp"

namespace iota::model {

struct TrainConfig {
  std::vector<std::size_t> dims = {8, 16, 16, 4};
  std::uint64_t seed = 1;
  std::size_t micro_batch = 4;
  double learning_rate = 0.05;
  double noise = 0.01;

  void Validate() const {
    Require(dims.size() >= 2, ErrorKind::kInvalidConfig, "model.dims needs >= 2 sizes");
    for (auto d : dims) Require(d >= 1, ErrorKind::kInvalidConfig, "model.dims entries >= 1");
    Require(micro_batch >= 1, ErrorKind::kInvalidConfig, "model.micro_batch >= 1");
    Require(learning_rate >= 0.0, ErrorKind::kInvalidConfig, "model.learning_rate >= 0");
    Require(noise >= 0.0, ErrorKind::kInvalidConfig, "model.noise >= 0");
  }

  DataStream MakeStream() const {
    return DataStream(seed, dims.front(), dims.back(), micro_batch, noise);
  }
};

// Centralized single-process SGD over batches 0..steps-1 of the data stream.
// Returns the loss of each step, measured before that step's update.
inline std::vector<double> ReferenceTrain(const TrainConfig& config, std::size_t steps) {
  config.Validate();
  Model model = InitModel(config.seed, config.dims);
  const DataStream stream = config.MakeStream();
  const std::size_t n_layers = model.size();
  std::vector<double> losses;
  losses.reserve(steps);
  for (std::size_t step = 0; step < steps; ++step) {
    const Batch batch = stream.Get(step);
    std::vector<Rows> inputs(n_layers);
    Rows acts = batch.inputs;
    for (std::size_t l = 0; l < n_layers; ++l) {
      inputs[l] = acts;
      acts = ForwardBatch(model[l], acts, l + 1 == n_layers);
    }
    BatchLossResult loss = BatchLoss(acts, batch.targets);
    losses.push_back(loss.loss);
    Rows upstream = std::move(loss.grads);
    for (std::size_t l = n_layers; l-- > 0;) {
      BatchBackward bw = BackwardBatch(model[l], inputs[l], upstream, l + 1 == n_layers);
      model[l] = ApplyUpdate(model[l], bw.weight_grad, config.learning_rate);
      upstream = std::move(bw.input_grads);
    }
  }
  return losses;
}

}  // namespace iota::model
