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
#include <string>
#include <vector>

#include "iota/butterfly/plan.hpp"
#include "iota/error.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::butterfly {

// Fraction of shards that keep at least one live assignee when k of N miners
// fail: (C(N,2) - C(k,2)) / C(N,2). Both terms are exact integers, so the
// result is the correctly rounded value of that ratio.
inline double ValidShardFraction(std::size_t n, std::size_t k) {
  Require(n >= 2, ErrorKind::kTooFewMiners, "need N >= 2");
  Require(k <= n, ErrorKind::kInvalidArgument, "k must not exceed N");
  const auto total = static_cast<std::uint64_t>(PairCount(n));
  const auto lost = static_cast<std::uint64_t>(PairCount(k));
  return static_cast<double>(total - lost) / static_cast<double>(total);
}

// Bytes one miner moves in a butterfly round: upload W, download 2W, upload
// 2W/N merged shards, download W.
inline double PerMinerTransfer(double weight_bytes, std::size_t n_miners) {
  Require(n_miners >= 2, ErrorKind::kTooFewMiners, "need N_m >= 2");
  return 4.0 * weight_bytes + 2.0 * weight_bytes / static_cast<double>(n_miners);
}

// Central merger baseline through the same bucket: it downloads every
// miner's W and uploads the merged W once.
inline double CentralMergerTransfer(double weight_bytes, std::size_t n_miners) {
  return static_cast<double>(n_miners) * weight_bytes + weight_bytes;
}

// Per-shard loss under a failure set: a shard is lost iff both assignees failed.
inline std::vector<bool> LostShards(const ShardPlan& plan, const std::vector<bool>& failed) {
  Require(failed.size() == plan.n_miners(), ErrorKind::kShapeError,
          "failure mask length must equal N");
  std::vector<bool> lost(plan.shard_count(), false);
  for (std::size_t s = 0; s < plan.shard_count(); ++s) {
    lost[s] = failed[plan.assignment[s].i] && failed[plan.assignment[s].j];
  }
  return lost;
}

// Uniformly random k-subset of {0..n-1}, as a mask.
inline std::vector<bool> DrawFailures(std::size_t n, std::size_t k, kernel::RngStream& rng) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  std::vector<bool> mask(n, false);
  for (std::size_t t = 0; t < k; ++t) {
    const auto pick = t + static_cast<std::size_t>(rng.UniformIndex(n - t));
    std::swap(ids[t], ids[pick]);
    mask[ids[t]] = true;
  }
  return mask;
}

struct ResilienceRow {
  std::size_t n = 0;
  std::size_t k = 0;
  double analytic_fraction = 0.0;
  double empirical_fraction = 0.0;
  std::uint64_t valid_shards = 0;   // summed over trials
  std::uint64_t total_shards = 0;   // trials * |P|
};

// Monte-Carlo resilience: for every k, `trials` fresh plans with a random
// k-subset of failed miners; counts surviving shards from the plans.
inline std::vector<ResilienceRow> ResilienceCurve(std::size_t n, std::size_t k_max,
                                                  std::size_t trials, std::uint64_t seed) {
  Require(n >= 2, ErrorKind::kTooFewMiners, "need N >= 2");
  Require(k_max <= n, ErrorKind::kInvalidArgument, "k_max must not exceed N");
  Require(trials >= 1, ErrorKind::kInvalidArgument, "trials must be >= 1");
  const PairSet pairs = EnumeratePairs(n);
  kernel::RngStream root(seed, "bar/resilience");
  std::vector<ResilienceRow> rows;
  for (std::size_t k = 0; k <= k_max; ++k) {
    kernel::RngStream rng = root.Fork("k/" + std::to_string(k));
    ResilienceRow row{n, k, ValidShardFraction(n, k), 0.0, 0, 0};
    for (std::size_t t = 0; t < trials; ++t) {
      const ShardPlan plan = PlanShards(pairs, pairs.size(), 4, rng.NextU64());
      const std::vector<bool> failed = DrawFailures(n, k, rng);
      const std::vector<bool> lost = LostShards(plan, failed);
      for (bool l : lost) row.valid_shards += l ? 0 : 1;
      row.total_shards += plan.shard_count();
    }
    row.empirical_fraction =
        static_cast<double>(row.valid_shards) / static_cast<double>(row.total_shards);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace iota::butterfly
