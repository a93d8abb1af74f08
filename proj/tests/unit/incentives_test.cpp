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

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "iota/incentives/ledger.hpp"
#include "iota/incentives/stability.hpp"
#include "iota/kernel/rng.hpp"

namespace iota::incentives {
namespace {

constexpr double kHour = 3600.0;

// Window-sum oracle written from the definition, independent of the ledger.
double WindowSum(const std::vector<ScoreEntry>& entries, std::uint64_t miner, double now,
                 double gamma) {
  double total = 0.0;
  for (const auto& e : entries) {
    const double age = now - e.assigned_at;
    if (e.miner_id == miner && age >= 0.0 && age <= gamma) total += e.value;
  }
  return total;
}

TEST(DecayWeight, StepWithInclusiveBoundary) {
  const DecayPolicy p{100.0};
  EXPECT_EQ(DecayWeight(0.0, p), 1.0);
  EXPECT_EQ(DecayWeight(100.0, p), 1.0);
  EXPECT_EQ(DecayWeight(std::nextafter(100.0, 200.0), p), 0.0);
  EXPECT_EQ(DecayWeight(1e9, p), 0.0);
}

TEST(ScoreLedger, HandExamples) {
  ScoreLedger ledger(DecayPolicy{10.0});
  EXPECT_EQ(ledger.Incentive(1, 0.0), 0.0);
  ledger.Post({1, 0, 5.0, 15.0});  // age 5 at t=20
  ledger.Post({1, 0, 3.0, 0.0});   // age 20
  EXPECT_EQ(ledger.Incentive(1, 20.0), 5.0);
  ScoreLedger fresh(DecayPolicy{10.0});
  fresh.Post({2, 0, 1.5, 1.0});
  fresh.Post({2, 1, 2.5, 2.0});
  EXPECT_EQ(fresh.Incentive(2, 3.0), 4.0);
  EXPECT_THROW(fresh.Post({2, 1, -1.0, 2.0}), Error);
}

TEST(ScoreLedger, MatchesWindowSumOracle) {
  kernel::RngStream rng(21, "ledgers");
  for (int trial = 0; trial < 1000; ++trial) {
    const double gamma = rng.Uniform(0.5, 50.0);
    ScoreLedger ledger(DecayPolicy{gamma});
    std::vector<ScoreEntry> entries;
    const std::size_t n = rng.UniformIndex(40);
    for (std::size_t i = 0; i < n; ++i) {
      ScoreEntry e{rng.UniformIndex(4), i, std::floor(rng.Uniform(0, 20)), rng.Uniform(0, 100)};
      if (rng.Bernoulli(0.1)) e.assigned_at = std::round(e.assigned_at);  // exact boundary hits
      entries.push_back(e);
      ledger.Post(e);
    }
    for (int q = 0; q < 5; ++q) {
      double now = rng.Uniform(0, 120);
      if (q == 0 && n > 0) now = entries[0].assigned_at + gamma;  // boundary query
      for (std::uint64_t m = 0; m < 4; ++m) {
        ASSERT_EQ(ledger.Incentive(m, now), WindowSum(entries, m, now, gamma));
      }
    }
  }
}

TEST(ScoreLedger, AddingAnEntryNeverDecreasesIncentive) {
  kernel::RngStream rng(5);
  ScoreLedger ledger(DecayPolicy{10.0});
  for (int i = 0; i < 300; ++i) {
    const double now = rng.Uniform(0, 100);
    const auto before = ledger.Incentives(now);
    ledger.Post({rng.UniformIndex(3), 0, rng.Uniform(0, 5), rng.Uniform(0, 100)});
    for (const auto& [m, v] : before) EXPECT_GE(ledger.Incentive(m, now), v);
  }
}

TEST(ScoreLedger, SharesSumToOne) {
  ScoreLedger ledger(DecayPolicy{10.0});
  ledger.Post({0, 0, 3.0, 1.0});
  ledger.Post({1, 0, 1.0, 1.0});
  const auto shares = ledger.NormalizedShares(2.0);
  EXPECT_DOUBLE_EQ(shares.at(0), 0.75);
  EXPECT_DOUBLE_EQ(shares.at(1), 0.25);
  for (const auto& [m, s] : ledger.NormalizedShares(100.0)) EXPECT_EQ(s, 0.0);
}

TEST(ExpectedActiveScores, Formula) {
  EXPECT_DOUBLE_EQ(ExpectedActiveScores(10 * kHour, 0.5 * kHour), 20.0);
  EXPECT_DOUBLE_EQ(ExpectedActiveScores(kHour, kHour), 1.0);
}

TEST(PeriodicScoreSeries, AgreesWithLedger) {
  kernel::RngStream rng(3);
  const PeriodicScoreSeries series(7.0, 500.0, 0.2, kernel::RngStream(4, "s"));
  ScoreLedger ledger(DecayPolicy{30.0});
  for (std::size_t i = 0; i < series.times().size(); ++i) {
    ledger.Post({0, i, series.values()[i], series.times()[i]});
  }
  for (int q = 0; q < 200; ++q) {
    const double now = q % 10 == 0 ? 7.0 * (q / 10 + 5) : rng.Uniform(0, 520);
    const auto w = series.At(now, 30.0);
    EXPECT_NEAR(w.incentive, ledger.Incentive(0, now), 1e-9);
    EXPECT_EQ(w.live, ledger.LiveCount(0, now));
  }
}

TEST(StabilityCell, SteadyStateLiveCount) {
  const kernel::RngStream root(1, "t");
  for (auto [gamma, ts] : std::vector<std::pair<double, double>>{{10, 0.5}, {2, 1}, {1, 1}, {3, 0.7}}) {
    const auto cell = StabilityCell(gamma * kHour, ts * kHour, 100 * kHour, 0.0, 16, root);
    EXPECT_NEAR(cell.n_scores_measured, gamma / ts, 1.0) << gamma << "/" << ts;
    EXPECT_DOUBLE_EQ(cell.n_scores_expected, gamma / ts);
  }
}

TEST(StabilityCell, NoNoiseExactMultipleIsFlat) {
  const kernel::RngStream root(1, "t");
  const auto cell = StabilityCell(4 * kHour, kHour, 50 * kHour, 0.0, 8, root);
  EXPECT_EQ(cell.cv, 0.0);
  EXPECT_DOUBLE_EQ(cell.mean_incentive, 4.0);
}

TEST(StabilityCell, ShortHorizon) {
  const kernel::RngStream root(1, "t");
  try {
    StabilityCell(10.0, 1.0, 29.0, 0.0, 4, root);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientHorizon);
  }
}

TEST(StabilityCell, CvRatioFollowsWindowSize) {
  // Window sums of m i.i.d. scores have CV proportional to 1/sqrt(m).
  const kernel::RngStream root(8, "t");
  const auto small = StabilityCell(2 * kHour, kHour, 20000 * kHour, 0.1, 4, root);
  const auto large = StabilityCell(10 * kHour, kHour, 20000 * kHour, 0.1, 4, root);
  EXPECT_NEAR(large.cv / small.cv, std::sqrt(2.0 / 10.0), 0.03);
}

TEST(StabilitySweep, CvNonIncreasingInGamma) {
  SweepConfig c;
  c.gammas = {kHour, 2 * kHour, 4 * kHour, 8 * kHour};
  c.sync_intervals = {kHour / 4, kHour / 2, kHour};
  c.horizon = 5000 * kHour;
  c.score_noise = 0.1;
  const auto cells = StabilitySweep(c, 3);
  ASSERT_EQ(cells.size(), 12u);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t g = 1; g < 4; ++g) {
      EXPECT_LE(cells[t * 4 + g].cv, cells[t * 4 + g - 1].cv);
    }
  }
  EXPECT_THROW(StabilitySweep(SweepConfig{}, 1), Error);
}

}  // namespace
}  // namespace iota::incentives
