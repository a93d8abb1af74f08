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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::clasp {

using MinerId = std::uint64_t;
using Pathway = std::vector<MinerId>;           // one miner per layer
using LayerRoster = std::vector<std::vector<MinerId>>;

struct PathwayRecord {
  std::uint64_t sample_k = 0;
  Pathway pathway;
  double loss = 0.0;
};

// Independent uniform choice of one miner in every layer.
inline Pathway SamplePathway(const LayerRoster& roster, kernel::RngStream& rng) {
  Pathway path;
  path.reserve(roster.size());
  for (std::size_t l = 0; l < roster.size(); ++l) {
    Require(!roster[l].empty(), ErrorKind::kNoActiveMiners,
            "layer " + std::to_string(l) + " has no miners");
    path.push_back(roster[l][static_cast<std::size_t>(rng.UniformIndex(roster[l].size()))]);
  }
  return path;
}

// Per-sample loss of the stochastic toy: a clean path draws from
// N(mean, std); any malicious miner on the path scales both by (1 + penalty).
struct ToyLossModel {
  double clean_mean = 4.5;
  double clean_std = 0.2;
  double penalty = 0.1;
};

inline bool HitsAny(const Pathway& path, const std::set<MinerId>& malicious) {
  return std::any_of(path.begin(), path.end(), [&](MinerId m) { return malicious.count(m) != 0; });
}

inline double ToyLoss(const Pathway& path, const std::set<MinerId>& malicious,
                      kernel::RngStream& rng, const ToyLossModel& model = {}) {
  const double scale = HitsAny(path, malicious) ? 1.0 + model.penalty : 1.0;
  return std::max(0.0, rng.Normal(model.clean_mean * scale, model.clean_std * scale));
}

struct MinerLoss {
  double average = 0.0;
  std::uint64_t count = 0;   // |S_i|
  std::size_t layer = 0;
};

// Average loss over the samples each miner touched. Losses are summed in
// sorted order so the result does not depend on record order.
inline std::map<MinerId, MinerLoss> AverageLosses(const std::vector<PathwayRecord>& records) {
  Require(!records.empty(), ErrorKind::kInvalidArgument, "need at least one pathway record");
  std::map<MinerId, std::vector<double>> losses;
  std::map<MinerId, std::size_t> layers;
  for (const auto& r : records) {
    for (std::size_t l = 0; l < r.pathway.size(); ++l) {
      losses[r.pathway[l]].push_back(r.loss);
      layers[r.pathway[l]] = l;
    }
  }
  std::map<MinerId, MinerLoss> out;
  for (auto& [miner, values] : losses) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    out[miner] = {sum / static_cast<double>(values.size()), values.size(), layers[miner]};
  }
  return out;
}

struct AttributionRow {
  MinerId miner = 0;
  std::size_t layer = 0;
  std::uint64_t count = 0;
  double avg_loss = 0.0;
  double z = 0.0;
  bool flagged = false;
};

struct AttributionReport {
  std::vector<AttributionRow> rows;  // ordered by miner id
  std::set<MinerId> flagged;
  double threshold = 0.0;
  double scale = 0.0;                // pooled within-layer std of the averages

  std::vector<AttributionRow> SortedByZ() const {
    auto sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const AttributionRow& a, const AttributionRow& b) { return a.z > b.z; });
    return sorted;
  }
};

// z_i = (avg_i - layer mean) / pooled std of those within-layer residuals.
// Centering per layer keeps co-located honest miners (whose averages drop
// when a peer in their layer is bad) from masking the outlier; pooling the
// scale across layers keeps the statistic usable with only a few miners per
// layer. Flagged iff z_i >= threshold.
inline AttributionReport FlagOutliers(const std::map<MinerId, MinerLoss>& averages,
                                      double z_threshold) {
  std::size_t participating = 0;
  for (const auto& [m, l] : averages) participating += l.count > 0 ? 1 : 0;
  Require(participating >= 3, ErrorKind::kInvalidArgument,
          "outlier detection needs at least 3 participating miners");

  std::map<std::size_t, std::pair<double, std::size_t>> layer_sum;
  for (const auto& [m, l] : averages) {
    if (l.count == 0) continue;
    layer_sum[l.layer].first += l.average;
    layer_sum[l.layer].second += 1;
  }
  AttributionReport report;
  report.threshold = z_threshold;
  double ss = 0.0;
  for (const auto& [m, l] : averages) {
    if (l.count == 0) continue;
    const auto& [sum, n] = layer_sum[l.layer];
    const double resid = l.average - sum / static_cast<double>(n);
    ss += resid * resid;
    report.rows.push_back({m, l.layer, l.count, l.average, resid, false});
  }
  report.scale = std::sqrt(ss / static_cast<double>(report.rows.size()));
  for (auto& row : report.rows) {
    row.z = report.scale > 0.0 ? row.z / report.scale : 0.0;
    row.flagged = report.scale > 0.0 && row.z >= z_threshold;
    if (row.flagged) report.flagged.insert(row.miner);
  }
  return report;
}

inline AttributionReport FlagOutliers(const std::vector<PathwayRecord>& records, double z_threshold) {
  return FlagOutliers(AverageLosses(records), z_threshold);
}

struct ToyConfig {
  std::size_t layers = 5;
  std::size_t miners_per_layer = 5;
  std::uint64_t samples = 10000;
  std::vector<std::pair<std::size_t, std::size_t>> malicious = {{1, 2}, {3, 4}};  // (layer, slot)
  double z_threshold = 2.5;
  ToyLossModel loss{};
};

// Miner id = layer * miners_per_layer + slot.
inline MinerId ToyMinerId(const ToyConfig& config, std::size_t layer, std::size_t slot) {
  return static_cast<MinerId>(layer * config.miners_per_layer + slot);
}

inline LayerRoster ToyRoster(const ToyConfig& config) {
  LayerRoster roster(config.layers);
  for (std::size_t l = 0; l < config.layers; ++l) {
    for (std::size_t s = 0; s < config.miners_per_layer; ++s) {
      roster[l].push_back(ToyMinerId(config, l, s));
    }
  }
  return roster;
}

inline std::set<MinerId> ToyMaliciousSet(const ToyConfig& config) {
  std::set<MinerId> out;
  for (const auto& [l, s] : config.malicious) {
    Require(l < config.layers && s < config.miners_per_layer, ErrorKind::kInvalidConfig,
            "malicious miner position outside the grid");
    out.insert(ToyMinerId(config, l, s));
  }
  return out;
}

struct ToyResult {
  std::vector<PathwayRecord> records;
  std::map<MinerId, MinerLoss> averages;
  AttributionReport report;
  std::set<MinerId> malicious;
};

inline ToyResult RunToyExperiment(const ToyConfig& config, std::uint64_t seed) {
  Require(config.layers >= 1 && config.miners_per_layer >= 1, ErrorKind::kInvalidConfig,
          "toy grid must be non-empty");
  Require(config.samples >= 1, ErrorKind::kInvalidConfig, "toy needs at least one sample");
  const LayerRoster roster = ToyRoster(config);
  ToyResult result;
  result.malicious = ToyMaliciousSet(config);
  kernel::RngStream root(seed, "clasp/toy");
  kernel::RngStream route = root.Fork("route");
  kernel::RngStream noise = root.Fork("loss");
  result.records.reserve(config.samples);
  for (std::uint64_t k = 0; k < config.samples; ++k) {
    Pathway path = SamplePathway(roster, route);
    const double loss = ToyLoss(path, result.malicious, noise, config.loss);
    result.records.push_back({k, std::move(path), loss});
  }
  result.averages = AverageLosses(result.records);
  result.report = FlagOutliers(result.averages, config.z_threshold);
  return result;
}

}  // namespace iota::clasp
