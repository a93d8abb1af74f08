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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/blob_store.hpp"
#include "iota/kernel/codec.hpp"
#include "iota/kernel/rng.hpp"
#include "iota/model/mlp.hpp"

namespace iota::validator {

// a.b / (|a||b|). Two zero vectors count as identical; one zero vector as 0.
inline double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorKind::kShapeError, "cosine similarity length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 && nb == 0.0) return 1.0;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// |submitted| / |recomputed|; cosine alone cannot see a rescaled activation.
inline double MagnitudeRatio(std::span<const double> submitted, std::span<const double> recomputed) {
  double ns = 0.0, nr = 0.0;
  for (double v : submitted) ns += v * v;
  for (double v : recomputed) nr += v * v;
  if (ns == 0.0 && nr == 0.0) return 1.0;
  if (nr == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(ns) / std::sqrt(nr);
}

// Uniform choice among the active roster. Miners are never told.
inline std::uint64_t SelectTarget(const std::vector<std::uint64_t>& active, kernel::RngStream& rng) {
  Require(!active.empty(), ErrorKind::kNoActiveMiners, "no miner to validate");
  return active[static_cast<std::size_t>(rng.UniformIndex(active.size()))];
}

enum class Direction { kForward, kBackward };

// One pass a miner performed, in the order it performed it.
//   forward:  input_key = incoming activations, output_key = uploaded outputs
//   backward: input_key = upstream gradient (or targets on the last layer),
//             output_key = uploaded input gradient (empty on the first layer)
struct TraceOp {
  std::uint64_t batch_id = 0;
  Direction direction = Direction::kForward;
  std::string input_key;
  std::string output_key;
};

struct MinerTrace {
  std::uint64_t miner_id = 0;
  std::uint64_t epoch_n = 0;
  std::size_t layer = 0;
  bool is_last = false;
  double learning_rate = 0.0;
  std::vector<TraceOp> ops;

  std::uint64_t backward_pass_count() const {
    return static_cast<std::uint64_t>(std::count_if(
        ops.begin(), ops.end(), [](const TraceOp& op) { return op.direction == Direction::kBackward; }));
  }
};

struct ValidatorConfig {
  // Replay is bit-deterministic for honest miners, so both bands can be tight.
  double similarity_threshold = 1.0 - 1e-8;
  double magnitude_tolerance = 1e-6;  // |ratio - 1| must not exceed this
  double replay_fraction = 1.0;

  void Validate() const {
    Require(similarity_threshold > -1.0 && similarity_threshold <= 1.0, ErrorKind::kInvalidConfig,
            "validator.similarity_threshold must be in (-1, 1]");
    Require(magnitude_tolerance >= 0.0, ErrorKind::kInvalidConfig,
            "validator.magnitude_tolerance must be >= 0");
    Require(replay_fraction > 0.0 && replay_fraction <= 1.0, ErrorKind::kInvalidConfig,
            "validator.replay_fraction must be in (0, 1]");
  }
};

struct SampleCheck {
  std::uint64_t batch_id = 0;
  Direction direction = Direction::kForward;
  double similarity = 0.0;
  double magnitude_ratio = 0.0;
  bool ok = false;
};

struct Verdict {
  std::uint64_t miner_id = 0;
  std::uint64_t epoch_n = 0;
  std::string validator;
  std::vector<double> similarities;
  std::vector<SampleCheck> checks;
  double min_similarity = 1.0;
  bool passed = true;
  std::uint64_t score = 0;
};

// Re-executes every traced pass from the synced weights and compares the
// miner's uploads on the sampled batches. Score is the backward-pass count
// when every checked sample agrees, otherwise 0.
inline Verdict ReplayAndScore(kernel::BlobStore& store, const std::string& validator_actor,
                              const MinerTrace& trace, const model::LayerWeights& synced,
                              const ValidatorConfig& config, kernel::RngStream& rng) {
  config.Validate();
  using kernel::Float64Codec;
  Verdict verdict;
  verdict.miner_id = trace.miner_id;
  verdict.epoch_n = trace.epoch_n;
  verdict.validator = validator_actor;

  model::LayerWeights w = synced;
  struct Cached {
    model::Rows inputs;
    model::Rows outputs;
    bool checked = false;
    bool usable = false;
  };
  std::map<std::uint64_t, Cached> cache;

  auto fetch = [&](const std::string& key) -> std::vector<double> {
    return Float64Codec::Decode(store.Get(validator_actor, key));
  };
  // Compared row by row, so one sample's activation cannot hide inside the
  // norm of the whole micro-batch. The check keeps the worst row.
  auto record = [&](std::uint64_t batch, Direction dir, const model::Rows& recomputed,
                    const std::string& key) {
    SampleCheck check{batch, dir, 0.0, 0.0, false};
    const std::vector<double> flat = model::Concat(recomputed);
    if (store.Contains(key) && !recomputed.empty()) {
      const std::vector<double> submitted = fetch(key);
      if (submitted.size() == flat.size()) {
        const std::size_t width = recomputed.front().size();
        const std::span<const double> sub(submitted), rec(flat);
        check.similarity = 1.0;
        check.magnitude_ratio = 1.0;
        for (std::size_t off = 0; off < flat.size(); off += width) {
          const double sim = CosineSimilarity(sub.subspan(off, width), rec.subspan(off, width));
          const double ratio = MagnitudeRatio(sub.subspan(off, width), rec.subspan(off, width));
          check.similarity = std::min(check.similarity, sim);
          if (!(std::abs(ratio - 1.0) <= std::abs(check.magnitude_ratio - 1.0))) {
            check.magnitude_ratio = ratio;
          }
        }
      }
    }
    check.ok = check.similarity >= config.similarity_threshold &&
               std::abs(check.magnitude_ratio - 1.0) <= config.magnitude_tolerance;
    verdict.checks.push_back(check);
    verdict.similarities.push_back(check.similarity);
  };
  auto missing = [&](std::uint64_t batch, Direction dir) {
    verdict.checks.push_back({batch, dir, 0.0, 0.0, false});
    verdict.similarities.push_back(0.0);
  };

  for (const TraceOp& op : trace.ops) {
    if (op.direction == Direction::kForward) {
      Cached& c = cache[op.batch_id];
      c.checked = rng.Bernoulli(config.replay_fraction);
      if (!store.Contains(op.input_key)) {
        c.usable = false;
        if (c.checked) missing(op.batch_id, op.direction);
        continue;
      }
      c.inputs = model::Split(fetch(op.input_key), w.d_in);
      c.outputs = model::ForwardBatch(w, c.inputs, trace.is_last);
      c.usable = true;
      if (c.checked) record(op.batch_id, op.direction, c.outputs, op.output_key);
      continue;
    }
    auto it = cache.find(op.batch_id);
    if (it == cache.end() || !it->second.usable || !store.Contains(op.input_key)) {
      if (it == cache.end() || it->second.checked) missing(op.batch_id, op.direction);
      continue;
    }
    Cached& c = it->second;
    model::Rows upstream;
    if (trace.is_last) {
      const model::Rows targets = model::Split(fetch(op.input_key), w.d_out);
      upstream = model::BatchLoss(c.outputs, targets).grads;
    } else {
      upstream = model::Split(fetch(op.input_key), w.d_out);
    }
    model::BatchBackward bw = model::BackwardBatch(w, c.inputs, upstream, trace.is_last);
    if (c.checked && !op.output_key.empty()) {
      record(op.batch_id, op.direction, bw.input_grads, op.output_key);
    }
    w = model::ApplyUpdate(w, bw.weight_grad, trace.learning_rate);
    cache.erase(it);
  }

  for (const SampleCheck& check : verdict.checks) {
    verdict.min_similarity = std::min(verdict.min_similarity, check.similarity);
    verdict.passed = verdict.passed && check.ok;
  }
  verdict.score = verdict.passed ? trace.backward_pass_count() : 0;
  return verdict;
}

}  // namespace iota::validator
