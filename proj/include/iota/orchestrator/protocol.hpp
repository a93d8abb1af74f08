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
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iota/error.hpp"

namespace iota::orchestrator {

// ---- honesty profiles

struct Honest {};
struct Dropout {
  double p_fail = 0.0;  // per stage
};
struct Deceptive {
  double tamper_scale = 2.0;
};
struct Lazy {
  double skip_probability = 0.0;
};

using HonestyProfile = std::variant<Honest, Dropout, Deceptive, Lazy>;

inline void ValidateProfile(const HonestyProfile& profile) {
  auto prob = [](double p, const char* what) {
    Require(p >= 0.0 && p <= 1.0, ErrorKind::kInvalidConfig,
            std::string(what) + " must be in [0, 1]");
  };
  if (auto* d = std::get_if<Dropout>(&profile)) prob(d->p_fail, "p_fail");
  if (auto* l = std::get_if<Lazy>(&profile)) prob(l->skip_probability, "skip_probability");
  if (auto* d = std::get_if<Deceptive>(&profile)) {
    Require(d->tamper_scale > 0.0, ErrorKind::kInvalidConfig, "tamper_scale must be > 0");
  }
}

inline std::string ProfileName(const HonestyProfile& profile) {
  struct {
    std::string operator()(const Honest&) const { return "honest"; }
    std::string operator()(const Dropout&) const { return "dropout"; }
    std::string operator()(const Deceptive&) const { return "deceptive"; }
    std::string operator()(const Lazy&) const { return "lazy"; }
  } visitor;
  return std::visit(visitor, profile);
}

// ---- roster

struct MinerRecord {
  std::uint64_t miner_id = 0;
  std::size_t layer = 0;
  HonestyProfile profile = Honest{};
  double speed = 1.0;            // compute-time multiplier
  std::uint64_t batches_done = 0;
  double registered_at = 0.0;
  bool active = false;
};

class Roster {
 public:
  explicit Roster(std::size_t n_layers) : n_layers_(n_layers) {
    Require(n_layers >= 1, ErrorKind::kInvalidConfig, "need at least one layer");
  }

  std::size_t n_layers() const { return n_layers_; }
  const std::vector<MinerRecord>& miners() const { return miners_; }
  MinerRecord& at(std::uint64_t id) { return miners_.at(static_cast<std::size_t>(id)); }
  const MinerRecord& at(std::uint64_t id) const { return miners_.at(static_cast<std::size_t>(id)); }

  // Registered miners (active or waiting) per layer.
  std::vector<std::size_t> Populations() const {
    std::vector<std::size_t> pop(n_layers_, 0);
    for (const auto& m : miners_) ++pop[m.layer];
    return pop;
  }

  // Permissionless join: least-populated layer, ties to the lowest index.
  // The miner stays inactive until the next full synchronization completes.
  MinerRecord& Register(const HonestyProfile& profile, double now, double speed = 1.0) {
    ValidateProfile(profile);
    Require(speed > 0.0, ErrorKind::kInvalidConfig, "miner speed must be > 0");
    const auto pop = Populations();
    std::size_t layer = 0;
    for (std::size_t l = 1; l < n_layers_; ++l) {
      if (pop[l] < pop[layer]) layer = l;
    }
    MinerRecord record;
    record.miner_id = miners_.size();
    record.layer = layer;
    record.profile = profile;
    record.speed = speed;
    record.registered_at = now;
    miners_.push_back(record);
    return miners_.back();
  }

  std::vector<std::uint64_t> ActiveInLayer(std::size_t layer) const {
    std::vector<std::uint64_t> out;
    for (const auto& m : miners_) {
      if (m.active && m.layer == layer) out.push_back(m.miner_id);
    }
    return out;
  }

  std::vector<std::uint64_t> Active() const {
    std::vector<std::uint64_t> out;
    for (const auto& m : miners_) {
      if (m.active) out.push_back(m.miner_id);
    }
    return out;
  }

  std::vector<std::uint64_t> Pending() const {
    std::vector<std::uint64_t> out;
    for (const auto& m : miners_) {
      if (!m.active) out.push_back(m.miner_id);
    }
    return out;
  }

 private:
  std::size_t n_layers_;
  std::vector<MinerRecord> miners_;
};

// ---- merge triggering

// Sum of B_m over miners with B_m >= B_min.
inline std::uint64_t EffectiveBatch(std::span<const std::uint64_t> batch_counts,
                                    std::uint64_t b_min) {
  std::uint64_t total = 0;
  for (auto b : batch_counts) {
    if (b >= b_min) total += b;
  }
  return total;
}

inline bool MergeReady(std::span<const std::uint64_t> batch_counts, std::uint64_t b_min,
                       double trigger_fraction) {
  Require(trigger_fraction > 0.0 && trigger_fraction <= 1.0, ErrorKind::kInvalidArgument,
          "trigger_fraction must be in (0, 1]");
  Require(!batch_counts.empty(), ErrorKind::kNoActiveMiners, "no active miners");
  std::size_t qualifying = 0;
  for (auto b : batch_counts) qualifying += b >= b_min ? 1 : 0;
  return static_cast<double>(qualifying) / static_cast<double>(batch_counts.size()) >=
         trigger_fraction;
}

// ---- stage machine

enum class Stage { kTraining, kCompressedSharing, kFullSync, kValidation };

inline const char* StageName(Stage s) {
  switch (s) {
    case Stage::kTraining: return "training";
    case Stage::kCompressedSharing: return "compressed_sharing";
    case Stage::kFullSync: return "full_sync";
    case Stage::kValidation: return "validation";
  }
  return "?";
}

enum class StageEvent { kMergeReady, kShardsMerged, kScoresPosted };

inline const char* StageEventName(StageEvent e) {
  switch (e) {
    case StageEvent::kMergeReady: return "merge_ready";
    case StageEvent::kShardsMerged: return "shards_merged";
    case StageEvent::kScoresPosted: return "scores_posted";
  }
  return "?";
}

struct EpochState {
  std::uint64_t epoch_n = 0;
  Stage stage = Stage::kTraining;
  std::size_t compressed_stages_per_epoch = 0;
  std::size_t compressed_done = 0;
  std::uint64_t b_min = 1;
  double trigger_fraction = 0.66;

  friend bool operator==(const EpochState&, const EpochState&) = default;
};

// Training -> CompressedSharing x c -> FullSync -> Validation -> Training.
// epoch_n advances when the full sync completes.
inline EpochState AdvanceStage(const EpochState& state, StageEvent event) {
  EpochState next = state;
  auto illegal = [&]() {
    Fail(ErrorKind::kProtocolViolation, std::string("event ") + StageEventName(event) +
                                            " is not legal in stage " + StageName(state.stage));
  };
  switch (state.stage) {
    case Stage::kTraining:
      if (event != StageEvent::kMergeReady) illegal();
      next.compressed_done = 0;
      next.stage = state.compressed_stages_per_epoch > 0 ? Stage::kCompressedSharing
                                                         : Stage::kFullSync;
      break;
    case Stage::kCompressedSharing:
      if (event != StageEvent::kShardsMerged) illegal();
      next.compressed_done = state.compressed_done + 1;
      next.stage = next.compressed_done < state.compressed_stages_per_epoch
                       ? Stage::kCompressedSharing
                       : Stage::kFullSync;
      break;
    case Stage::kFullSync:
      if (event != StageEvent::kShardsMerged) illegal();
      next.stage = Stage::kValidation;
      next.epoch_n = state.epoch_n + 1;
      break;
    case Stage::kValidation:
      if (event != StageEvent::kScoresPosted) illegal();
      next.stage = Stage::kTraining;
      break;
  }
  return next;
}

}  // namespace iota::orchestrator
