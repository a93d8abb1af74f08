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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "iota/error.hpp"
#include "iota/incentives/ledger.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::incentives {

struct SweepConfig {
  std::vector<double> gammas;
  std::vector<double> sync_intervals;
  double horizon = 0.0;
  double score_noise = 0.0;    // std-dev of i.i.d. noise on unit scores
  std::size_t samples_per_interval = 8;
};

struct SweepCell {
  double gamma = 0.0;
  double sync_interval = 0.0;
  double n_scores_expected = 0.0;
  double n_scores_measured = 0.0;
  double cv = 0.0;
  double mean_incentive = 0.0;
};

// Periodic posts at t = j * T_s with values 1 + noise (clamped at 0). Queries
// are O(log n) through prefix sums and agree with ScoreLedger::Incentive.
class PeriodicScoreSeries {
 public:
  PeriodicScoreSeries(double sync_interval, double horizon, double noise, kernel::RngStream rng) {
    const auto posts = static_cast<std::size_t>(std::floor(horizon / sync_interval));
    times_.reserve(posts);
    prefix_.reserve(posts + 1);
    prefix_.push_back(0.0);
    for (std::size_t j = 1; j <= posts; ++j) {
      times_.push_back(static_cast<double>(j) * sync_interval);
      const double v = noise > 0.0 ? std::max(0.0, 1.0 + rng.Normal(0.0, noise)) : 1.0;
      values_.push_back(v);
      prefix_.push_back(prefix_.back() + v);
    }
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  struct Window {
    double incentive = 0.0;
    std::size_t live = 0;
  };

  // Entries with 0 <= now - t <= gamma.
  Window At(double now, double gamma) const {
    const auto first = std::lower_bound(times_.begin(), times_.end(), now - gamma);
    const auto last = std::upper_bound(times_.begin(), times_.end(), now);
    if (last <= first) return {};
    const auto a = static_cast<std::size_t>(first - times_.begin());
    const auto b = static_cast<std::size_t>(last - times_.begin());
    return {prefix_[b] - prefix_[a], b - a};
  }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

namespace detail {
inline std::string Label(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}
}  // namespace detail

// Coefficient of variation of I_m(t) once the decay window is full. Samples
// sit between posting instants, and the noise stream depends only on T_s so
// every gamma at a given T_s sees the same scores.
inline SweepCell StabilityCell(double gamma, double sync_interval, double horizon, double noise,
                               std::size_t samples_per_interval, const kernel::RngStream& root) {
  Require(gamma > 0.0, ErrorKind::kInvalidArgument, "gamma must be > 0");
  Require(sync_interval > 0.0, ErrorKind::kInvalidArgument, "T_s must be > 0");
  Require(horizon >= 3.0 * gamma, ErrorKind::kInsufficientHorizon,
          "horizon must be at least 3 * gamma");
  Require(samples_per_interval >= 1, ErrorKind::kInvalidArgument, "samples_per_interval >= 1");
  const PeriodicScoreSeries series(sync_interval, horizon, noise,
                                   root.Fork("Ts/" + detail::Label(sync_interval)));
  const double dt = sync_interval / static_cast<double>(samples_per_interval);
  const double start = gamma + sync_interval;
  double sum = 0.0, sum_sq = 0.0, live = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0;; ++i) {
    const double t = start + (static_cast<double>(i) + 0.5) * dt;
    if (t > horizon) break;
    const auto w = series.At(t, gamma);
    sum += w.incentive;
    sum_sq += w.incentive * w.incentive;
    live += static_cast<double>(w.live);
    ++count;
  }
  SweepCell cell{gamma, sync_interval, ExpectedActiveScores(gamma, sync_interval), 0.0, 0.0, 0.0};
  if (count == 0) return cell;
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  cell.n_scores_measured = live / n;
  cell.mean_incentive = mean;
  // Relative round-off of the running sums is ~1e-16; treat that as zero spread.
  cell.cv = mean > 0.0 && var > 1e-12 * mean * mean ? std::sqrt(var) / mean : 0.0;
  return cell;
}

inline std::vector<SweepCell> StabilitySweep(const SweepConfig& config, std::uint64_t seed) {
  Require(!config.gammas.empty() && !config.sync_intervals.empty(), ErrorKind::kInvalidArgument,
          "sweep grids must be non-empty");
  Require(config.score_noise >= 0.0, ErrorKind::kInvalidArgument, "score_noise must be >= 0");
  const kernel::RngStream root(seed, "incentives/sweep");
  std::vector<SweepCell> cells;
  for (double ts : config.sync_intervals) {
    for (double gamma : config.gammas) {
      cells.push_back(StabilityCell(gamma, ts, config.horizon, config.score_noise,
                                    config.samples_per_interval, root));
    }
  }
  return cells;
}

}  // namespace iota::incentives
