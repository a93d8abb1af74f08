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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iota/iota.hpp"
#include "iota/io/config.hpp"
#include "iota/io/csv.hpp"
#include "iota/io/report.hpp"
#include "support/replay_fixture.hpp"

namespace {

using namespace iota;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const fs::path kSource = IOTA_SOURCE_DIR;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- 1. swarm vs centralized training

Outcome SwarmMatchesCentral() {
  const auto t0 = Clock::now();
  orchestrator::ScenarioConfig c;
  c.epochs = 4;
  c.b_min = 50;  // 50 batches per epoch, 200 steps
  c.miners_per_layer = 1;
  const auto report = orchestrator::RunScenario(c);
  const double elapsed = Seconds(t0);

  const auto ref = model::ReferenceTrain(c.Model(), 200);
  const io::CsvTable golden = io::ReadCsv(kSource / "tests" / "golden" / "reference_loss.csv");
  bool ok = report.losses.size() == 200 && golden.rows.size() == 200;
  double worst = 0.0;
  for (std::size_t i = 0; ok && i < 200; ++i) {
    worst = std::max(worst, std::abs(report.losses[i].loss - ref[i]));
    worst = std::max(worst, std::abs(report.losses[i].loss - io::ParseDouble(golden.rows[i][1])));
    ok = ok && report.losses[i].batch_id == i;
  }
  ok = ok && worst <= 1e-9 && elapsed < 10.0 && c.n_layers() == 3;
  return {ok, "steps " + std::to_string(report.losses.size()) + ", max |dloss| " +
                  Fmt("%.3g", worst) + ", " + Fmt("%.2f", elapsed) + " s"};
}

// ---- 2. resilience

Outcome BarResilience() {
  const auto t0 = Clock::now();
  const double closed = 1.0 - 20.0 / 2450.0;
  const double f = butterfly::ValidShardFraction(50, 5);
  bool ok = std::abs(f - closed) < 1e-15 && std::abs(f - 0.99184) < 5e-6;

  const auto rows = butterfly::ResilienceCurve(50, 25, 1000, 1);
  ok = ok && rows.size() == 26;
  for (const auto& r : rows) {
    const double pairs_total = 50.0 * 49.0 / 2.0;
    const double pairs_lost = r.k * (r.k - 1.0) / 2.0;
    ok = ok && r.empirical_fraction == r.analytic_fraction &&
         std::abs(r.analytic_fraction - (pairs_total - pairs_lost) / pairs_total) < 1e-15;
  }

  // Independent Monte Carlo: fresh plans, failures drawn here, lost shards
  // counted straight from the assignment pairs.
  kernel::RngStream rng(2, "acceptance/bar");
  bool mc_exact = true;
  for (std::size_t k = 0; k <= 25; ++k) {
    for (int trial = 0; trial < 1000; ++trial) {
      const butterfly::ShardPlan plan =
          butterfly::PlanShards(butterfly::EnumeratePairs(50), 1225, 4, rng.NextU64());
      std::vector<std::size_t> ids(50);
      for (std::size_t i = 0; i < 50; ++i) ids[i] = i;
      rng.Shuffle(ids);
      std::vector<bool> down(50, false);
      for (std::size_t i = 0; i < k; ++i) down[ids[i]] = true;
      std::size_t valid = 0;
      for (const auto& [a, b] : plan.assignment) valid += (down[a] && down[b]) ? 0 : 1;
      mc_exact = mc_exact &&
                 static_cast<double>(valid) / 1225.0 == butterfly::ValidShardFraction(50, k);
    }
  }
  const double elapsed = Seconds(t0);
  ok = ok && mc_exact && elapsed < 5.0;
  return {ok, "f(50,5) = " + Fmt("%.6f", f) + ", 26x1000 draws exact: " +
                  (mc_exact ? "yes" : "no") + ", " + Fmt("%.2f", elapsed) + " s"};
}

// ---- 3. transfer accounting

std::vector<butterfly::Vector> Payloads(std::size_t n, std::size_t len, kernel::RngStream rng) {
  std::vector<butterfly::Vector> out(n, butterfly::Vector(len));
  for (auto& p : out) {
    for (double& v : p) v = rng.Normal();
  }
  return out;
}

std::vector<std::uint64_t> Ids(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

Outcome TransferAccounting() {
  bool ok = true;
  std::string detail;
  for (std::size_t n : {2u, 3u, 10u, 50u}) {
    const std::size_t pairs = n * (n - 1) / 2;
    // Shard-aligned payload, then one that does not divide evenly.
    for (std::size_t len : {8 * pairs, 8 * pairs + pairs / 2 + 1}) {
      kernel::BlobStore store;
      const auto plan = butterfly::PlanShards(butterfly::EnumeratePairs(n), len, 4, 100 + n);
      const std::vector<double> fallback(len, 0.0);
      const auto r = butterfly::RunAllReduce(store, plan, Payloads(n, len, kernel::RngStream(n)),
                                             Ids(n), std::vector<butterfly::MergeRole>(n), fallback,
                                             butterfly::MeanReduce);
      const double w = 4.0 * static_cast<double>(len);
      const double formula = butterfly::PerMinerTransfer(w, n);
      std::size_t max_shard = 0;
      for (auto l : plan.length) max_shard = std::max(max_shard, l);
      double worst = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double total = static_cast<double>(r.miner_transfer[m].bytes_uploaded +
                                                 r.miner_transfer[m].bytes_downloaded);
        double own = 0.0;
        for (auto s : plan.ShardsOf(m)) own += 4.0 * static_cast<double>(plan.length[s]);
        ok = ok && total == 2.0 * w + static_cast<double>(n + 1) * own;  // exact, from the plan
        worst = std::max(worst, std::abs(total - formula));
      }
      if (len % pairs == 0) {
        ok = ok && worst <= 4.0 * static_cast<double>(max_shard);
        detail += "N=" + std::to_string(n) + " dev " + Fmt("%.0f", worst) + " B; ";
      }
    }
  }
  return {ok, detail + "plan-exact for uneven shards"};
}

// ---- 4. deceptive merge

Outcome DeceptiveMerge() {
  const auto t0 = Clock::now();
  const std::size_t n = 50, len = 4 * 1225;
  kernel::RngStream rng(4, "acceptance/deceptive");
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  rng.Shuffle(ids);
  std::set<std::size_t> liars(ids.begin(), ids.begin() + 10);
  std::vector<butterfly::MergeRole> roles(n);
  for (auto m : liars) roles[m] = butterfly::MergeRole::Deceptive(2.0);

  kernel::BlobStore store;
  const auto plan = butterfly::PlanShards(butterfly::EnumeratePairs(n), len, 4, rng.NextU64());
  const std::vector<double> fallback(len, 0.0);
  const auto r = butterfly::RunAllReduce(store, plan, Payloads(n, len, rng.Fork("payloads")), Ids(n),
                                         roles, fallback, butterfly::MeanReduce);
  double worst_liar = 0.0, worst_honest = 1.0;
  bool defined = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      defined = defined && r.agreement.defined(i, j);
      const bool li = liars.count(i) != 0, lj = liars.count(j) != 0;
      if (li && lj) continue;
      if (li || lj) worst_liar = std::max(worst_liar, r.agreement.at(i, j));
      else worst_honest = std::min(worst_honest, r.agreement.at(i, j));
    }
  }
  const double elapsed = Seconds(t0);
  const bool ok = defined && worst_liar < 0.5 && worst_honest >= 0.999 && elapsed < 10.0;
  return {ok, "max deceptive-honest " + Fmt("%.3f", worst_liar) + ", min honest-honest " +
                  Fmt("%.6f", worst_honest) + ", " + Fmt("%.2f", elapsed) + " s"};
}

// ---- 5. loss attribution toy

Outcome ClaspToy() {
  clasp::ToyConfig cfg;  // 5x5, malicious (1,2) and (3,4), z 2.5
  cfg.samples = 10000;
  const auto small = clasp::RunToyExperiment(cfg, 1);
  bool ok = small.report.flagged == small.malicious && small.malicious.size() == 2;

  cfg.samples = 100000;
  const auto large = clasp::RunToyExperiment(cfg, 1);
  double worst_rel = 0.0;
  for (auto m : large.malicious) {
    worst_rel = std::max(worst_rel, std::abs(large.averages.at(m).average - 4.95) / 4.95);
  }
  ok = ok && worst_rel <= 0.01;

  std::set<std::size_t> bad_layers;
  for (const auto& [l, s] : cfg.malicious) bad_layers.insert(l);
  bool colocated_lower = true;
  for (const auto* run : {&small, &large}) {
    double worst_colocated = -1e300, best_clean = 1e300;
    for (const auto& [m, l] : run->averages) {
      if (run->malicious.count(m)) continue;
      if (bad_layers.count(l.layer)) worst_colocated = std::max(worst_colocated, l.average);
      else best_clean = std::min(best_clean, l.average);
    }
    colocated_lower = colocated_lower && worst_colocated < best_clean;
  }
  ok = ok && colocated_lower;
  std::string flagged;
  for (auto m : small.report.flagged) flagged += std::to_string(m) + " ";
  return {ok, "flagged {" + flagged + "}, malicious avg rel err " + Fmt("%.4f", worst_rel) +
                  ", co-located lower: " + (colocated_lower ? "yes" : "no")};
}

// ---- 6. incentives

Outcome Incentives() {
  constexpr double kHour = 3600.0;
  kernel::RngStream rng(6, "acceptance/ledger");
  bool oracle_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const double gamma = rng.Uniform(1.0, 30.0);
    incentives::ScoreLedger ledger(incentives::DecayPolicy{gamma});
    std::vector<incentives::ScoreEntry> entries;
    for (std::size_t i = 0, n = rng.UniformIndex(30); i < n; ++i) {
      incentives::ScoreEntry e{rng.UniformIndex(3), i, std::floor(rng.Uniform(0, 10)),
                               std::round(rng.Uniform(0, 60))};
      entries.push_back(e);
      ledger.Post(e);
    }
    for (int q = 0; q < 4; ++q) {
      const double now = std::round(rng.Uniform(0, 90));
      for (std::uint64_t m = 0; m < 3; ++m) {
        double sum = 0.0;
        for (const auto& e : entries) {
          if (e.miner_id == m && e.assigned_at <= now && now - e.assigned_at <= gamma) sum += e.value;
        }
        oracle_ok = oracle_ok && ledger.Incentive(m, now) == sum;
      }
    }
  }

  const kernel::RngStream root(1, "acceptance/steady");
  bool live_ok = true;
  std::string live;
  for (auto [g, ts] : std::vector<std::pair<double, double>>{{10, 0.5}, {2, 1}, {1, 1}}) {
    const auto cell = incentives::StabilityCell(g * kHour, ts * kHour, 200 * kHour, 0.1, 16, root);
    live_ok = live_ok && std::abs(cell.n_scores_measured - g / ts) <= 1.0;
    live += Fmt("%.2f", cell.n_scores_measured) + " ";
  }

  std::uint64_t seed = 1;
  const auto sweep_cfg = io::SweepFromToml(io::ParseFile(kSource / "configs" / "sweep.toml"), &seed);
  const auto cells = incentives::StabilitySweep(sweep_cfg, seed);
  bool cv_ok = true;
  const std::size_t ng = sweep_cfg.gammas.size();
  for (std::size_t t = 0; t < sweep_cfg.sync_intervals.size(); ++t) {
    for (std::size_t g = 1; g < ng; ++g) cv_ok = cv_ok && cells[t * ng + g].cv <= cells[t * ng + g - 1].cv;
  }
  return {oracle_ok && live_ok && cv_ok, std::string("window oracle ") + (oracle_ok ? "ok" : "MISMATCH") +
                                             ", live counts " + live + "(expect 20 2 1), CV monotone " +
                                             (cv_ok ? "yes" : "no")};
}

// ---- 7. effective batch

Outcome EffectiveBatch() {
  kernel::RngStream rng(7, "acceptance/beff");
  bool ok = true;
  std::size_t all_below = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::uint64_t> b(1 + rng.UniformIndex(12));
    for (auto& x : b) x = rng.UniformIndex(40);
    const std::uint64_t b_min = trial % 10 == 0 ? 41 + rng.UniformIndex(10) : rng.UniformIndex(45);
    std::uint64_t expected = 0;
    bool any = false;
    for (auto x : b) {
      if (x >= b_min) {
        expected += x;
        any = true;
      }
    }
    if (!any) {
      ++all_below;
      ok = ok && expected == 0;
    }
    ok = ok && orchestrator::EffectiveBatch(b, b_min) == expected;
  }
  ok = ok && all_below >= 1000;
  return {ok, "10000 instances, " + std::to_string(all_below) + " all-below-threshold"};
}

// ---- 8. validator

Outcome Validator() {
  std::size_t honest_fail = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const bool first = t % 3 == 0, last = t % 3 == 2;
    auto run = testing::SimulateMiner(t, 3 + t % 5, 2 + t % 4, first, last, 2 + 2 * (t % 3));
    kernel::RngStream rng(t, "acceptance/honest");
    const auto v = validator::ReplayAndScore(run.store, "validator", run.trace, run.synced, {}, rng);
    honest_fail += v.passed && v.score == run.trace.backward_pass_count() ? 0 : 1;
  }

  std::size_t trials = 0, missed = 0;
  kernel::RngStream pick(8, "acceptance/perturb");
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const bool first = t % 3 == 0, last = t % 3 == 2;
    const std::size_t d_in = 3 + t % 5, d_out = 2 + t % 4;
    auto run = testing::SimulateMiner(5000 + t, d_in, d_out, first, last, 4);
    const std::string key = run.upload_keys[pick.UniformIndex(run.upload_keys.size())];
    const std::size_t width = key.rfind("fwd", 0) == 0 ? d_out : d_in;
    const double relative = std::pow(10.0, pick.Uniform(-3.0, 0.0));
    testing::PerturbRow(run.store, key, width, pick.UniformIndex(run.micro_batch),
                        t % 2 == 0 ? 1e-3 : relative, static_cast<int>(t % 5), pick);
    validator::ValidatorConfig cfg;
    cfg.replay_fraction = 1.0;
    kernel::RngStream rng(t, "acceptance/replay");
    ++trials;
    missed += validator::ReplayAndScore(run.store, "validator", run.trace, run.synced, cfg, rng).passed;
  }
  return {honest_fail == 0 && missed == 0,
          "honest failures " + std::to_string(honest_fail) + "/1000, missed perturbations " +
              std::to_string(missed) + "/" + std::to_string(trials)};
}

// ---- 9. determinism

std::uint64_t Fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::uint64_t> HashCsvs(const fs::path& dir) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") out[entry.path().filename().string()] = Fnv1a(Slurp(entry.path()));
  }
  return out;
}

Outcome Determinism() {
  const fs::path scratch = fs::temp_directory_path() / "iota-sim-acceptance";
  fs::remove_all(scratch);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "configs/deceptive.toml"},
      {"train", "configs/dropout.toml"},
      {"bar-resilience", "configs/bar.toml"},
      {"clasp", "configs/clasp.toml"},
      {"incentive-sweep", "configs/sweep.toml"},
  };
  bool ok = true;
  std::size_t files = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto& [cmd, config] = commands[i];
    std::vector<std::map<std::string, std::uint64_t>> hashes;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = scratch / (std::to_string(i) + "-" + std::to_string(rep));
      const std::string line = std::string("\"") + IOTA_SIM_BINARY + "\" " + cmd + " -c \"" +
                               (kSource / config).string() + "\" -o \"" + out.string() +
                               "\" > /dev/null 2>&1";
      const int status = std::system(line.c_str());
      ok = ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      hashes.push_back(ok ? HashCsvs(out) : std::map<std::string, std::uint64_t>{});
    }
    ok = ok && !hashes[0].empty() && hashes[0] == hashes[1];
    files += hashes[0].size();
  }
  return {ok, std::to_string(files) + " CSVs hashed across " + std::to_string(commands.size()) +
                  " command pairs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"swarm matches centralized oracle", SwarmMatchesCentral},
      {"butterfly resilience", BarResilience},
      {"transfer accounting", TransferAccounting},
      {"deceptive merge detection", DeceptiveMerge},
      {"loss attribution toy", ClaspToy},
      {"incentives", Incentives},
      {"effective batch", EffectiveBatch},
      {"validator replay", Validator},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
