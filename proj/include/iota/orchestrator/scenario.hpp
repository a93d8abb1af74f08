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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iota/butterfly/all_reduce.hpp"
#include "iota/butterfly/plan.hpp"
#include "iota/clasp/clasp.hpp"
#include "iota/error.hpp"
#include "iota/incentives/ledger.hpp"
#include "iota/kernel/blob_store.hpp"
#include "iota/kernel/codec.hpp"
#include "iota/kernel/event_queue.hpp"
#include "iota/kernel/network.hpp"
#include "iota/kernel/rng.hpp"
#include "iota/model/data.hpp"
#include "iota/model/mlp.hpp"
#include "iota/model/payload.hpp"
#include "iota/model/reference.hpp"
#include "iota/orchestrator/protocol.hpp"
#include "iota/validator/validator.hpp"

namespace iota::orchestrator {

struct MinerOverride {
  std::size_t layer = 0;
  std::size_t slot = 0;  // position among the layer's initial miners
  HonestyProfile profile = Honest{};
  double speed = 1.0;
};

struct JoinEvent {
  std::uint64_t epoch = 0;  // registers when this epoch's training starts
  HonestyProfile profile = Honest{};
  double speed = 1.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t epochs = 5;

  // model
  std::vector<std::size_t> dims = {8, 16, 16, 4};
  std::size_t micro_batch = 4;
  double learning_rate = 0.05;
  double noise = 0.01;

  // swarm
  std::size_t miners_per_layer = 1;
  std::vector<MinerOverride> overrides;
  std::vector<JoinEvent> joins;
  std::uint64_t b_min = 1;
  double trigger_fraction = 0.66;
  std::size_t compressed_stages_per_epoch = 0;
  std::size_t pipeline_slots = 0;  // 0 = miners_per_layer
  double compute_seconds = 0.05;   // per forward or backward pass at speed 1
  std::uint64_t max_batches_per_epoch = 100000;

  // network
  kernel::NetworkModel network{kernel::MbpsToBps(100.0), 1.0};

  // merging
  std::string reducer = "mean";  // mean | median | outer
  double outer_lr = 1.0;
  double agreement_tolerance = 1e-6;
  butterfly::TieBreak tie_break = butterfly::TieBreak::kFallback;

  validator::ValidatorConfig validator{};

  // incentives
  double gamma = 3600.0;  // seconds

  std::size_t n_layers() const { return dims.size() - 1; }
  std::size_t slots() const { return pipeline_slots == 0 ? miners_per_layer : pipeline_slots; }

  model::TrainConfig Model() const {
    return model::TrainConfig{dims, seed, micro_batch, learning_rate, noise};
  }

  void Validate() const {
    Model().Validate();
    Require(epochs >= 1, ErrorKind::kInvalidConfig, "epochs must be >= 1");
    Require(miners_per_layer >= 1, ErrorKind::kInvalidConfig, "swarm.miners_per_layer >= 1");
    Require(trigger_fraction > 0.0 && trigger_fraction <= 1.0, ErrorKind::kInvalidConfig,
            "swarm.trigger_fraction must be in (0, 1]");
    Require(compute_seconds >= 0.0, ErrorKind::kInvalidConfig, "swarm.compute_seconds >= 0");
    Require(max_batches_per_epoch >= 1, ErrorKind::kInvalidConfig,
            "swarm.max_batches_per_epoch >= 1");
    Require(reducer == "mean" || reducer == "median" || reducer == "outer",
            ErrorKind::kInvalidConfig, "merge.reducer must be mean, median or outer");
    Require(agreement_tolerance >= 0.0, ErrorKind::kInvalidConfig,
            "merge.agreement_tolerance >= 0");
    network.Validate();
    validator.Validate();
    incentives::DecayPolicy{gamma}.Validate();
    for (const auto& o : overrides) {
      Require(o.layer < n_layers() && o.slot < miners_per_layer, ErrorKind::kInvalidConfig,
              "miner override outside the initial grid");
      ValidateProfile(o.profile);
      Require(o.speed > 0.0, ErrorKind::kInvalidConfig, "miner speed must be > 0");
    }
    for (const auto& j : joins) {
      ValidateProfile(j.profile);
      Require(j.speed > 0.0, ErrorKind::kInvalidConfig, "miner speed must be > 0");
    }
  }

  butterfly::Reducer MakeReducer() const {
    if (reducer == "median") return butterfly::MedianReduce;
    if (reducer == "outer") return butterfly::OuterStepReducer(outer_lr);
    return butterfly::MeanReduce;
  }
};

// ---- report rows

struct LossPoint {
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  std::uint64_t batch_id = 0;
  double loss = 0.0;
  double sim_time = 0.0;
};

struct EpochSummary {
  std::uint64_t epoch = 0;
  std::uint64_t b_eff = 0;
  std::uint64_t b_sum = 0;
  std::size_t qualifying = 0;
  std::size_t active = 0;
  std::uint64_t dispatched = 0;
  std::uint64_t completed = 0;
  std::uint64_t dropped = 0;
  double training_end = 0.0;
  double sync_end = 0.0;
  double epoch_end = 0.0;
};

struct TransferRow {
  std::uint64_t epoch = 0;
  std::string stage;
  std::string actor;
  std::uint64_t bytes_up = 0;
  std::uint64_t bytes_down = 0;
  double wire_up = 0.0;  // after the stage's compression ratio
  double wire_down = 0.0;
};

struct MergeRow {
  std::uint64_t epoch = 0;
  std::string stage;
  std::size_t layer = 0;
  std::size_t participants = 0;
  std::size_t failed = 0;
  std::size_t shards = 0;
  std::size_t valid = 0;
  std::size_t recovered = 0;
  std::size_t invalid = 0;
  std::size_t lost = 0;
  std::vector<std::uint64_t> flagged;  // miner ids
  double duration = 0.0;
};

struct VerdictRow {
  std::uint64_t epoch = 0;
  std::string validator;
  std::uint64_t miner = 0;
  double min_similarity = 0.0;
  bool passed = false;
  std::uint64_t score = 0;
  double sim_time = 0.0;
};

struct ScenarioReport {
  std::vector<LossPoint> losses;
  std::vector<EpochSummary> epochs;
  std::vector<TransferRow> transfers;
  std::vector<MergeRow> merges;
  std::vector<VerdictRow> verdicts;
  std::vector<clasp::PathwayRecord> pathways;
  incentives::ScoreLedger ledger;
  std::vector<MinerRecord> miners;
  std::vector<model::LayerWeights> final_weights;  // synced state per layer
  double end_time = 0.0;
  std::uint64_t events = 0;
};

// Drives the stage machine over the discrete-event kernel. One instance runs
// one scenario; it is single-threaded and deterministic in the config.
class Scenario {
 public:
  explicit Scenario(ScenarioConfig config)
      : config_(std::move(config)),
        roster_(ValidatedLayers(config_)),
        stream_(config_.Model().MakeStream()),
        store_(config_.network),
        root_(config_.seed, "scenario"),
        route_rng_(root_.Fork("route")),
        plan_rng_(root_.Fork("plan")) {
    report_.ledger = incentives::ScoreLedger(incentives::DecayPolicy{config_.gamma});
    state_.compressed_stages_per_epoch = config_.compressed_stages_per_epoch;
    state_.b_min = config_.b_min;
    state_.trigger_fraction = config_.trigger_fraction;
    activation_link_ = config_.network;
    weight_link_ = config_.network.Uncompressed();
    Bootstrap();
  }

  const EpochState& state() const { return state_; }
  const Roster& roster() const { return roster_; }
  kernel::BlobStore& store() { return store_; }
  const model::LayerWeights& MinerWeights(std::uint64_t id) const { return miners_.at(id).weights; }
  const model::LayerWeights& SyncedWeights(std::size_t layer) const { return synced_.at(layer); }
  const validator::MinerTrace& LastTrace(std::uint64_t id) const { return miners_.at(id).trace; }
  const ScenarioReport& report() const { return report_; }

  // Runs one full epoch: Training, CompressedSharing x c, FullSync, Validation.
  void RunEpoch() {
    const std::uint64_t epoch = epoch_index_;
    Require(state_.stage == Stage::kTraining, ErrorKind::kProtocolViolation,
            "epoch must start in training");
    for (const auto& j : config_.joins) {
      if (j.epoch == epoch) {
        MinerRecord& rec = roster_.Register(j.profile, queue_.now(), j.speed);
        miners_.emplace(rec.miner_id, MinerState{});
        behavior_rng_.emplace(rec.miner_id, root_.Fork("miner/" + std::to_string(rec.miner_id)));
      }
    }

    EpochSummary summary;
    summary.epoch = epoch;
    RunTraining(summary);

    std::vector<std::uint64_t> counts;
    qualifying_.clear();
    for (auto id : roster_.Active()) {
      const auto b = roster_.at(id).batches_done;
      counts.push_back(b);
      if (b >= config_.b_min) qualifying_.insert(id);
    }
    summary.active = counts.size();
    summary.b_eff = EffectiveBatch(counts, config_.b_min);
    for (auto b : counts) summary.b_sum += b;
    summary.qualifying = qualifying_.size();
    summary.training_end = queue_.now();
    for (auto id : roster_.Active()) roster_.at(id).batches_done = 0;
    state_ = AdvanceStage(state_, StageEvent::kMergeReady);

    while (state_.stage == Stage::kCompressedSharing) {
      RunSync(/*compressed=*/true);
      state_ = AdvanceStage(state_, StageEvent::kShardsMerged);
    }
    RunSync(/*compressed=*/false);
    state_ = AdvanceStage(state_, StageEvent::kShardsMerged);
    summary.sync_end = queue_.now();

    RunValidation();
    state_ = AdvanceStage(state_, StageEvent::kScoresPosted);
    summary.epoch_end = queue_.now();
    report_.epochs.push_back(summary);
    ++epoch_index_;
  }

  ScenarioReport Run() {
    for (std::size_t e = 0; e < config_.epochs; ++e) RunEpoch();
    return Finish();
  }

  ScenarioReport Finish() {
    report_.miners = roster_.miners();
    report_.final_weights = synced_;
    report_.end_time = queue_.now();
    report_.events = queue_.fired();
    return report_;
  }

 private:
  struct MinerState {
    model::LayerWeights weights;
    double busy_until = 0.0;
    bool failed = false;  // dropout roll for the current stage
    std::map<std::uint64_t, model::Rows> cached_inputs;
    validator::MinerTrace trace;
  };

  struct Flight {
    std::uint64_t batch_id = 0;
    std::size_t slot = 0;
    clasp::Pathway path;
    model::Rows loss_grads;
  };

  static std::size_t ValidatedLayers(const ScenarioConfig& config) {
    config.Validate();
    return config.n_layers();
  }

  std::string Actor(std::uint64_t id) const { return butterfly::MinerActor(id); }
  bool IsLast(std::size_t layer) const { return layer + 1 == roster_.n_layers(); }

  void Bootstrap() {
    const model::Model init = model::InitModel(config_.seed, config_.dims);
    synced_ = init;
    std::vector<std::size_t> per_layer(roster_.n_layers(), 0);
    for (std::size_t i = 0; i < config_.miners_per_layer * roster_.n_layers(); ++i) {
      // Slot is known once the layer is; overrides apply by (layer, slot).
      MinerRecord& rec = roster_.Register(Honest{}, 0.0);
      const std::size_t slot = per_layer[rec.layer]++;
      for (const auto& o : config_.overrides) {
        if (o.layer == rec.layer && o.slot == slot) {
          rec.profile = o.profile;
          rec.speed = o.speed;
        }
      }
      rec.active = true;
      MinerState st;
      st.weights = synced_[rec.layer];
      miners_.emplace(rec.miner_id, std::move(st));
      behavior_rng_.emplace(rec.miner_id, root_.Fork("miner/" + std::to_string(rec.miner_id)));
    }
  }

  // Per-stage dropout roll.
  void RollFailures() {
    for (auto id : roster_.Active()) {
      const auto* d = std::get_if<Dropout>(&roster_.at(id).profile);
      miners_.at(id).failed = d != nullptr && behavior_rng_.at(id).Bernoulli(d->p_fail);
    }
  }

  // ---- training

  void RunTraining(EpochSummary& summary) {
    trigger_ = false;
    dispatched_ = completed_ = dropped_ = 0;
    in_flight_ = 0;
    flights_.clear();
    trained_.assign(roster_.n_layers(), {});
    epoch_start_.assign(synced_.begin(), synced_.end());
    RollFailures();
    for (auto id : roster_.Active()) {
      MinerState& st = miners_.at(id);
      st.cached_inputs.clear();
      st.trace = validator::MinerTrace{};
      st.trace.miner_id = id;
      st.trace.epoch_n = epoch_index_;
      st.trace.layer = roster_.at(id).layer;
      st.trace.is_last = IsLast(st.trace.layer);
      st.trace.learning_rate = config_.learning_rate;
      trained_[st.trace.layer].push_back(id);
    }
    layer_rosters_.assign(roster_.n_layers(), {});
    for (std::size_t l = 0; l < roster_.n_layers(); ++l) layer_rosters_[l] = roster_.ActiveInLayer(l);

    const auto snapshot = store_.meters();
    for (std::size_t s = 0; s < config_.slots(); ++s) {
      queue_.Schedule(queue_.now(), [this, s] { Dispatch(s); });
    }
    queue_.Run();
    Require(trigger_, ErrorKind::kProtocolViolation,
            "merge trigger not reached within swarm.max_batches_per_epoch batches in epoch " +
                std::to_string(epoch_index_));
    summary.dispatched = dispatched_;
    summary.completed = completed_;
    summary.dropped = dropped_;
    RecordTransfers(snapshot, StageName(Stage::kTraining), activation_link_.compression_ratio);
  }

  void Dispatch(std::size_t slot) {
    if (trigger_ || dispatched_ >= config_.max_batches_per_epoch) return;
    const std::uint64_t batch_id = next_batch_++;
    ++dispatched_;
    ++in_flight_;
    Flight f;
    f.batch_id = batch_id;
    f.slot = slot;
    f.path = clasp::SamplePathway(layer_rosters_, route_rng_);
    const model::Batch batch = stream_.Get(batch_id);
    store_.Put("dataset", DataKey(batch_id, "inputs"),
               kernel::Float64Codec::Encode(model::Concat(batch.inputs)), queue_.now());
    store_.Put("dataset", DataKey(batch_id, "targets"),
               kernel::Float64Codec::Encode(model::Concat(batch.targets)), queue_.now());
    flights_.push_back(std::move(f));
    const std::size_t index = flights_.size() - 1;
    queue_.Schedule(queue_.now(), [this, index] { Forward(index, 0); });
  }

  static std::string DataKey(std::uint64_t batch_id, const char* what) {
    return "data/" + std::to_string(batch_id) + "/" + what;
  }
  std::string ActivationKey(std::size_t layer, std::uint64_t miner, std::uint64_t batch,
                            const char* dir) const {
    return kernel::BlobKey(epoch_index_, layer, miner,
                           kernel::kind::Activations(std::to_string(batch) + "/" + dir));
  }

  // Occupies the miner for one pass and returns when it finishes.
  double Occupy(MinerState& st, std::uint64_t id) {
    const double start = std::max(queue_.now(), st.busy_until);
    st.busy_until = start + config_.compute_seconds * roster_.at(id).speed;
    return st.busy_until;
  }

  // Upload at `ready`, then the next hop downloads it.
  double Hop(std::uint64_t bytes, double ready) const {
    return ready + 2.0 * kernel::TransferDuration(bytes, activation_link_);
  }

  void Forward(std::size_t index, std::size_t layer) {
    Flight& f = flights_[index];
    const std::uint64_t id = f.path[layer];
    MinerState& st = miners_.at(id);
    if (st.failed) return Drop(index);
    if (const auto* lazy = std::get_if<Lazy>(&roster_.at(id).profile)) {
      if (behavior_rng_.at(id).Bernoulli(lazy->skip_probability)) return Drop(index);
    }
    const std::string input_key =
        layer == 0 ? DataKey(f.batch_id, "inputs") : ActivationKey(layer - 1, f.path[layer - 1], f.batch_id, "fwd");
    model::Rows inputs =
        model::Split(kernel::Float64Codec::Decode(store_.Get(Actor(id), input_key)), st.weights.d_in);
    model::Rows outputs = model::ForwardBatch(st.weights, inputs, IsLast(layer));
    if (const auto* dec = std::get_if<Deceptive>(&roster_.at(id).profile)) {
      for (auto& row : outputs) {
        for (double& v : row) v *= dec->tamper_scale;
      }
    }
    st.cached_inputs[f.batch_id] = std::move(inputs);
    const std::string output_key = ActivationKey(layer, id, f.batch_id, "fwd");
    const double done = Occupy(st, id);
    const auto receipt = store_.Put(Actor(id), output_key,
                                    kernel::Float64Codec::Encode(model::Concat(outputs)),
                                    queue_.now(), activation_link_);
    st.trace.ops.push_back({f.batch_id, validator::Direction::kForward, input_key, output_key});

    if (!IsLast(layer)) {
      queue_.Schedule(Hop(receipt.size, done), [this, index, layer] { Forward(index, layer + 1); });
      return;
    }
    const model::Rows targets = model::Split(
        kernel::Float64Codec::Decode(store_.Get(Actor(id), DataKey(f.batch_id, "targets"))),
        st.weights.d_out);
    model::BatchLossResult loss = model::BatchLoss(outputs, targets);
    f.loss_grads = std::move(loss.grads);
    report_.losses.push_back({report_.losses.size(), epoch_index_, f.batch_id, loss.loss, done});
    report_.pathways.push_back({f.batch_id, f.path, loss.loss});
    queue_.Schedule(done, [this, index, layer] { Backward(index, layer); });
  }

  void Backward(std::size_t index, std::size_t layer) {
    Flight& f = flights_[index];
    const std::uint64_t id = f.path[layer];
    MinerState& st = miners_.at(id);
    if (st.failed) return Drop(index);
    std::string input_key;
    model::Rows upstream;
    if (IsLast(layer)) {
      input_key = DataKey(f.batch_id, "targets");
      upstream = std::move(f.loss_grads);
    } else {
      input_key = ActivationKey(layer + 1, f.path[layer + 1], f.batch_id, "bwd");
      upstream = model::Split(kernel::Float64Codec::Decode(store_.Get(Actor(id), input_key)),
                              st.weights.d_out);
    }
    auto cached = st.cached_inputs.find(f.batch_id);
    Require(cached != st.cached_inputs.end(), ErrorKind::kProtocolViolation,
            "backward without a matching forward");
    model::BatchBackward bw = model::BackwardBatch(st.weights, cached->second, upstream, IsLast(layer));
    st.cached_inputs.erase(cached);
    st.weights = model::ApplyUpdate(st.weights, bw.weight_grad, config_.learning_rate);
    ++roster_.at(id).batches_done;
    const double done = Occupy(st, id);

    if (layer == 0) {
      st.trace.ops.push_back({f.batch_id, validator::Direction::kBackward, input_key, ""});
      queue_.Schedule(done, [this, index] { Complete(index); });
      return;
    }
    const std::string output_key = ActivationKey(layer, id, f.batch_id, "bwd");
    const auto receipt = store_.Put(Actor(id), output_key,
                                    kernel::Float64Codec::Encode(model::Concat(bw.input_grads)),
                                    queue_.now(), activation_link_);
    st.trace.ops.push_back({f.batch_id, validator::Direction::kBackward, input_key, output_key});
    queue_.Schedule(Hop(receipt.size, done), [this, index, layer] { Backward(index, layer - 1); });
  }

  void Drop(std::size_t index) {
    ++dropped_;
    --in_flight_;
    const std::size_t slot = flights_[index].slot;
    queue_.Schedule(queue_.now(), [this, slot] { Dispatch(slot); });
  }

  void Complete(std::size_t index) {
    ++completed_;
    --in_flight_;
    if (!trigger_) {
      std::vector<std::uint64_t> counts;
      for (auto id : roster_.Active()) counts.push_back(roster_.at(id).batches_done);
      trigger_ = MergeReady(counts, config_.b_min, config_.trigger_fraction);
    }
    const std::size_t slot = flights_[index].slot;
    queue_.Schedule(queue_.now(), [this, slot] { Dispatch(slot); });
  }

  // ---- synchronization

  void RunSync(bool compressed) {
    Require(state_.stage == Stage::kCompressedSharing || state_.stage == Stage::kFullSync,
            ErrorKind::kProtocolViolation, "shard plans only exist in sharing/sync stages");
    const auto snapshot = store_.meters();
    const char* stage = StageName(state_.stage);
    const kernel::NetworkModel link =
        compressed ? kernel::NetworkModel{config_.network.bandwidth_bps,
                                          config_.network.compression_ratio}
                   : weight_link_;
    RollFailures();
    double duration = 0.0;
    for (std::size_t l = 0; l < roster_.n_layers(); ++l) {
      duration = std::max(duration, SyncLayer(l, stage, link));
    }
    queue_.Schedule(queue_.now() + duration, [] {});
    queue_.Run();
    if (!compressed) ActivatePending();
    RecordTransfers(snapshot, stage, link.compression_ratio);
  }

  double SyncLayer(std::size_t layer, const char* stage, const kernel::NetworkModel& link) {
    std::vector<std::uint64_t> participants;
    for (auto id : roster_.ActiveInLayer(layer)) {
      if (qualifying_.count(id) != 0) participants.push_back(id);
    }
    const model::LayerWeights anchor = synced_[layer];
    model::LayerWeights merged = anchor;
    MergeRow row;
    row.epoch = epoch_index_;
    row.stage = stage;
    row.layer = layer;
    row.participants = participants.size();
    double duration = 0.0;

    if (participants.size() >= 2) {
      std::vector<butterfly::Vector> payloads;
      std::vector<butterfly::MergeRole> roles;
      for (auto id : participants) {
        payloads.push_back(model::Flatten(miners_.at(id).weights));
        if (miners_.at(id).failed) {
          roles.push_back(butterfly::MergeRole::Failed());
          ++row.failed;
        } else if (const auto* d = std::get_if<Deceptive>(&roster_.at(id).profile)) {
          roles.push_back(butterfly::MergeRole::Deceptive(d->tamper_scale));
        } else {
          roles.push_back(butterfly::MergeRole::Honest());
        }
      }
      const butterfly::ShardPlan plan =
          butterfly::PlanShards(butterfly::EnumeratePairs(participants.size()),
                                anchor.ParameterCount(), kernel::Float32Codec::kBytesPerValue,
                                plan_rng_.NextU64());
      butterfly::AllReduceOptions options;
      options.epoch = epoch_index_;
      options.layer = layer;
      options.now = queue_.now();
      options.agreement_tolerance = config_.agreement_tolerance;
      options.tie_break = config_.tie_break;
      options.link = link;
      const std::vector<double> fallback = model::Flatten(anchor);
      const auto result = butterfly::RunAllReduce<kernel::Float32Codec>(
          store_, plan, payloads, participants, roles, fallback, config_.MakeReducer(), options);
      merged = model::Unflatten(anchor, result.merged);
      row.shards = plan.shard_count();
      row.valid = result.CountStatus(butterfly::ShardStatus::kValid);
      row.recovered = result.CountStatus(butterfly::ShardStatus::kRecovered);
      row.invalid = result.CountStatus(butterfly::ShardStatus::kInvalid);
      row.lost = result.CountStatus(butterfly::ShardStatus::kLost);
      for (auto m : result.flagged) row.flagged.push_back(participants[m]);
      duration = result.duration;
    } else if (participants.size() == 1 && !miners_.at(participants[0]).failed) {
      // Nothing to reduce; the lone qualifying miner's state is the layer state.
      const std::uint64_t id = participants[0];
      merged = miners_.at(id).weights;
      const auto receipt = store_.Put(Actor(id), kernel::BlobKey(epoch_index_, layer, id, kernel::kind::Weights()),
                                      model::EncodeWeightPayload(merged), queue_.now(), link,
                                      kernel::PutOptions{true});
      duration = receipt.completion_time - queue_.now();
      row.shards = 1;
      row.valid = 1;
    } else {
      row.failed = participants.size();
      row.shards = participants.empty() ? 0 : 1;
      row.lost = row.shards;
    }

    // Published layer state, for miners outside the merge, joiners and validators.
    const std::string synced_key =
        "epoch/" + std::to_string(epoch_index_) + "/layer/" + std::to_string(layer) + "/synced";
    store_.Put("orchestrator", synced_key, model::EncodeWeightPayload(merged), queue_.now(), link,
               kernel::PutOptions{true});
    for (auto id : roster_.ActiveInLayer(layer)) {
      const bool merged_in = std::find(participants.begin(), participants.end(), id) != participants.end();
      if (!merged_in) store_.Get(Actor(id), synced_key);
      miners_.at(id).weights = merged;
    }
    synced_[layer] = merged;
    row.duration = duration;
    report_.merges.push_back(std::move(row));
    return duration;
  }

  // Joiners copy the freshly synced state and start with the next epoch.
  void ActivatePending() {
    for (auto id : roster_.Pending()) {
      MinerRecord& rec = roster_.at(id);
      const std::string synced_key = "epoch/" + std::to_string(epoch_index_) + "/layer/" +
                                     std::to_string(rec.layer) + "/synced";
      store_.Get(Actor(id), synced_key);
      miners_.at(id).weights = synced_[rec.layer];
      rec.active = true;
    }
  }

  // ---- validation

  void RunValidation() {
    const auto snapshot = store_.meters();
    double duration = 0.0;
    std::vector<std::pair<VerdictRow, incentives::ScoreEntry>> posted;
    for (std::size_t l = 0; l < roster_.n_layers(); ++l) {
      if (trained_[l].empty()) continue;
      auto rng_it = validator_rng_.find(l);
      if (rng_it == validator_rng_.end()) {
        rng_it = validator_rng_.emplace(l, root_.Fork("validator/" + std::to_string(l))).first;
      }
      const std::uint64_t target = validator::SelectTarget(trained_[l], rng_it->second);
      const std::string who = "validator/" + std::to_string(l);
      const validator::MinerTrace& trace = miners_.at(target).trace;
      const validator::Verdict verdict = validator::ReplayAndScore(
          store_, who, trace, epoch_start_[l], config_.validator, rng_it->second);
      duration = std::max(duration, config_.compute_seconds * static_cast<double>(trace.ops.size()));
      VerdictRow row{trace.epoch_n, who, target, verdict.min_similarity, verdict.passed,
                     verdict.score, 0.0};
      posted.push_back({row, incentives::ScoreEntry{target, trace.epoch_n,
                                                    static_cast<double>(verdict.score), 0.0}});
    }
    queue_.Schedule(queue_.now() + duration, [] {});
    queue_.Run();
    for (auto& [row, entry] : posted) {
      row.sim_time = queue_.now();
      entry.assigned_at = queue_.now();
      PostScore(entry);
      report_.verdicts.push_back(row);
    }
    RecordTransfers(snapshot, StageName(Stage::kValidation), 1.0);
  }

  void PostScore(const incentives::ScoreEntry& entry) {
    Require(state_.stage == Stage::kValidation, ErrorKind::kProtocolViolation,
            "scores are only posted during validation");
    report_.ledger.Post(entry);
  }

  void RecordTransfers(const std::map<std::string, kernel::TransferMeter>& before,
                       const char* stage, double ratio) {
    for (const auto& [actor, now] : store_.meters()) {
      kernel::TransferMeter prev;
      if (auto it = before.find(actor); it != before.end()) prev = it->second;
      const std::uint64_t up = now.bytes_uploaded - prev.bytes_uploaded;
      const std::uint64_t down = now.bytes_downloaded - prev.bytes_downloaded;
      if (up == 0 && down == 0) continue;
      report_.transfers.push_back({epoch_index_, stage, actor, up, down,
                                   static_cast<double>(up) / ratio,
                                   static_cast<double>(down) / ratio});
    }
  }

  ScenarioConfig config_;
  Roster roster_;
  model::DataStream stream_;
  kernel::BlobStore store_;
  kernel::EventQueue queue_;
  kernel::RngStream root_;
  kernel::RngStream route_rng_;
  kernel::RngStream plan_rng_;
  std::map<std::uint64_t, kernel::RngStream> behavior_rng_;
  std::map<std::size_t, kernel::RngStream> validator_rng_;
  kernel::NetworkModel activation_link_;
  kernel::NetworkModel weight_link_;

  EpochState state_;
  std::uint64_t epoch_index_ = 0;
  std::map<std::uint64_t, MinerState> miners_;
  std::vector<model::LayerWeights> synced_;
  std::vector<model::LayerWeights> epoch_start_;
  std::vector<std::vector<std::uint64_t>> trained_;
  clasp::LayerRoster layer_rosters_;
  std::set<std::uint64_t> qualifying_;

  std::vector<Flight> flights_;
  std::uint64_t next_batch_ = 0;
  std::uint64_t dispatched_ = 0, completed_ = 0, dropped_ = 0;
  std::int64_t in_flight_ = 0;
  bool trigger_ = false;

  ScenarioReport report_;
};

inline ScenarioReport RunScenario(const ScenarioConfig& config) {
  Scenario scenario(config);
  return scenario.Run();
}

}  // namespace iota::orchestrator
