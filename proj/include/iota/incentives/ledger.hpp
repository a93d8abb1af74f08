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
#include <map>
#include <vector>

#include "iota/error.hpp"

namespace iota::incentives {

struct ScoreEntry {
  std::uint64_t miner_id = 0;
  std::uint64_t epoch = 0;
  double value = 0.0;        // backward passes credited
  double assigned_at = 0.0;  // seconds
};

// Step decay. gamma is the decay time (seconds).
struct DecayPolicy {
  double gamma = 3600.0;

  void Validate() const {
    Require(gamma > 0.0, ErrorKind::kInvalidConfig, "gamma must be > 0");
  }
};

// 1 while the score is at most gamma old (inclusive), then 0.
inline double DecayWeight(double t_elapsed, const DecayPolicy& policy) {
  return t_elapsed <= policy.gamma ? 1.0 : 0.0;
}

inline double ExpectedActiveScores(double gamma, double sync_interval) {
  Require(sync_interval > 0.0, ErrorKind::kInvalidArgument, "T_s must be > 0");
  return gamma / sync_interval;
}

// Append-only score ledger.
class ScoreLedger {
 public:
  explicit ScoreLedger(DecayPolicy policy = {}) : policy_(policy) { policy_.Validate(); }

  const DecayPolicy& policy() const { return policy_; }
  const std::vector<ScoreEntry>& entries() const { return entries_; }

  void Post(const ScoreEntry& entry) {
    Require(entry.value >= 0.0, ErrorKind::kInvalidArgument, "scores are non-negative");
    entries_.push_back(entry);
  }

  // I_m(now): entries not yet assigned at `now` do not count.
  double Incentive(std::uint64_t miner_id, double now) const {
    double total = 0.0;
    for (const auto& e : entries_) {
      if (e.miner_id != miner_id || e.assigned_at > now) continue;
      total += e.value * DecayWeight(now - e.assigned_at, policy_);
    }
    return total;
  }

  std::size_t LiveCount(std::uint64_t miner_id, double now) const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.miner_id == miner_id && e.assigned_at <= now &&
          DecayWeight(now - e.assigned_at, policy_) > 0.0) {
        ++n;
      }
    }
    return n;
  }

  std::map<std::uint64_t, double> Incentives(double now) const {
    std::map<std::uint64_t, double> out;
    for (const auto& e : entries_) out.emplace(e.miner_id, 0.0);
    for (auto& [miner, value] : out) value = Incentive(miner, now);
    return out;
  }

  // I_m / sum(I); all zero when nobody holds a live score.
  std::map<std::uint64_t, double> NormalizedShares(double now) const {
    auto shares = Incentives(now);
    double total = 0.0;
    for (const auto& [m, v] : shares) total += v;
    for (auto& [m, v] : shares) v = total > 0.0 ? v / total : 0.0;
    return shares;
  }

 private:
  DecayPolicy policy_;
  std::vector<ScoreEntry> entries_;
};

}  // namespace iota::incentives
