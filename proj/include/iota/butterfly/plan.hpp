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
#include <cstdint>
#include <string>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::butterfly {

struct MinerPair {
  std::size_t i = 0;
  std::size_t j = 0;

  bool Contains(std::size_t m) const { return i == m || j == m; }
  std::size_t Partner(std::size_t m) const { return m == i ? j : i; }

  friend bool operator==(const MinerPair&, const MinerPair&) = default;
  friend auto operator<=>(const MinerPair&, const MinerPair&) = default;
};

struct PairSet {
  std::size_t n_miners = 0;
  std::vector<MinerPair> pairs;  // lexicographic, i < j

  std::size_t size() const { return pairs.size(); }
};

inline std::size_t PairCount(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

// Every unordered pair of miners in one layer, lexicographically ordered.
inline PairSet EnumeratePairs(std::size_t n) {
  Require(n >= 2, ErrorKind::kTooFewMiners,
          "butterfly merge needs at least 2 miners, got " + std::to_string(n));
  PairSet set{n, {}};
  set.pairs.reserve(PairCount(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) set.pairs.push_back({i, j});
  }
  return set;
}

// Byte-range sidecar for one payload. In the uncompressed case
// start byte = bytes_per_weight * weight_index.
struct ShardMetadata {
  std::size_t bytes_per_weight = 4;
  std::vector<std::uint64_t> index_offsets;  // start byte per shard
  std::vector<std::uint64_t> lengths;        // bytes per shard

  std::string ToCsv() const {
    std::string out = "shard_index,start_byte,length\n";
    for (std::size_t s = 0; s < index_offsets.size(); ++s) {
      out += std::to_string(s) + "," + std::to_string(index_offsets[s]) + "," +
             std::to_string(lengths[s]) + "\n";
    }
    return out;
  }
};

// Random bijection shard index -> miner pair, plus element-aligned bounds.
struct ShardPlan {
  PairSet pair_set;
  std::vector<MinerPair> assignment;   // shard index -> pair
  std::vector<std::size_t> start;      // first element of each shard
  std::vector<std::size_t> length;     // elements per shard
  std::size_t payload_len = 0;
  std::size_t bytes_per_weight = 4;
  std::uint64_t seed = 0;

  std::size_t shard_count() const { return assignment.size(); }
  std::size_t n_miners() const { return pair_set.n_miners; }

  std::size_t ShardFor(std::size_t a, std::size_t b) const {
    const MinerPair key{std::min(a, b), std::max(a, b)};
    for (std::size_t s = 0; s < assignment.size(); ++s) {
      if (assignment[s] == key) return s;
    }
    Fail(ErrorKind::kInvalidArgument, "no shard for pair");
  }

  // Shard indices a miner is assigned to; this is all a miner learns of the plan.
  std::vector<std::size_t> ShardsOf(std::size_t miner) const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < assignment.size(); ++s) {
      if (assignment[s].Contains(miner)) out.push_back(s);
    }
    return out;
  }

  ShardMetadata Metadata() const {
    ShardMetadata meta{bytes_per_weight, {}, {}};
    for (std::size_t s = 0; s < start.size(); ++s) {
      meta.index_offsets.push_back(static_cast<std::uint64_t>(start[s] * bytes_per_weight));
      meta.lengths.push_back(static_cast<std::uint64_t>(length[s] * bytes_per_weight));
    }
    return meta;
  }
};

// Balanced element-aligned split; the remainder goes one-per-shard from shard 0.
inline void SplitBounds(std::size_t payload_len, std::size_t shards,
                        std::vector<std::size_t>& start, std::vector<std::size_t>& length) {
  start.assign(shards, 0);
  length.assign(shards, 0);
  const std::size_t base = payload_len / shards;
  const std::size_t rem = payload_len % shards;
  std::size_t offset = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    start[s] = offset;
    length[s] = base + (s < rem ? 1 : 0);
    offset += length[s];
  }
}

inline ShardPlan PlanShards(const PairSet& pairs, std::size_t payload_len,
                            std::size_t bytes_per_weight, std::uint64_t seed) {
  Require(!pairs.pairs.empty(), ErrorKind::kTooFewMiners, "empty pair set");
  Require(payload_len >= pairs.size(), ErrorKind::kDegenerateShards,
          "payload of " + std::to_string(payload_len) + " elements cannot fill " +
              std::to_string(pairs.size()) + " shards");
  Require(bytes_per_weight >= 1, ErrorKind::kInvalidArgument, "bytes_per_weight must be >= 1");
  ShardPlan plan;
  plan.pair_set = pairs;
  plan.assignment = pairs.pairs;
  plan.payload_len = payload_len;
  plan.bytes_per_weight = bytes_per_weight;
  plan.seed = seed;
  kernel::RngStream rng(seed, "butterfly/plan");
  rng.Shuffle(plan.assignment);
  SplitBounds(payload_len, plan.shard_count(), plan.start, plan.length);
  return plan;
}

}  // namespace iota::butterfly
