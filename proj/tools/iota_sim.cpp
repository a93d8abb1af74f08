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

// iota-sim: command-line driver.
//
// Exit codes: 0 success, 2 bad configuration or usage, 3 runtime or
// protocol error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iota/iota.hpp"
#include "iota/io/config.hpp"
#include "iota/io/report.hpp"

namespace {

namespace fs = std::filesystem;
using iota::ErrorKind;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "TOML configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", c.seed, "Override the configured seed");
  cmd->add_option("-o,--out", c.out, "Output directory (default $IOTA_SIM_OUT or out/<command>)");
}

toml::table LoadDoc(const Common& c) {
  return c.config.empty() ? toml::table{} : iota::io::ParseFile(c.config);
}

fs::path OutDir(const Common& c, const std::string& command) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("IOTA_SIM_OUT"); env != nullptr && *env != '\0') {
    return fs::path(env) / command;
  }
  return fs::path("out") / command;
}

void Emit(const fs::path& dir, const iota::io::Outputs& outputs, toml::table resolved,
          const std::string& command, std::uint64_t seed) {
  std::vector<std::string> names;
  for (const auto& [name, text] : outputs) names.push_back(name);
  iota::io::WriteOutputs(dir, outputs);
  iota::io::CsvWriter::WriteFile(dir / "manifest.toml",
                                 iota::io::ManifestText(std::move(resolved), command, seed, names));
  std::cout << "wrote " << names.size() + 1 << " files to " << dir.string() << "\n";
}

int RunTrain(const Common& c) {
  const toml::table doc = LoadDoc(c);
  iota::orchestrator::ScenarioConfig config = iota::io::ScenarioFromToml(doc);
  if (c.seed) config.seed = *c.seed;
  const auto report = iota::orchestrator::RunScenario(config);
  Emit(OutDir(c, "train"), iota::io::ScenarioOutputs(report, config.n_layers()),
       iota::io::ScenarioToToml(config), "train", config.seed);
  std::size_t failed = 0;
  for (const auto& v : report.verdicts) failed += v.passed ? 0 : 1;
  std::cout << "epochs " << report.epochs.size() << ", steps " << report.losses.size()
            << ", final loss " << (report.losses.empty() ? 0.0 : report.losses.back().loss)
            << ", failed verdicts " << failed << "\n";
  return 0;
}

int RunResilience(const Common& c, std::optional<std::size_t> n, std::optional<std::size_t> k_max,
                  std::optional<std::size_t> trials) {
  std::uint64_t seed = 1;
  const toml::table doc = LoadDoc(c);
  iota::io::ResilienceConfig config = iota::io::ResilienceFromToml(doc, &seed);
  if (c.seed) seed = *c.seed;
  if (n) config.n = *n;
  if (k_max) config.k_max = *k_max;
  if (trials) config.trials = *trials;
  try {
    config.Validate();
  } catch (const iota::Error& e) {
    throw iota::Error(ErrorKind::kInvalidConfig, e.what());
  }
  const auto rows = iota::butterfly::ResilienceCurve(config.n, config.k_max, config.trials, seed);
  Emit(OutDir(c, "bar-resilience"), iota::io::ResilienceOutputs(rows),
       iota::io::ResilienceToToml(config), "bar-resilience", seed);
  return 0;
}

int RunClasp(const Common& c, const std::string& records_path) {
  std::uint64_t seed = 1;
  const toml::table doc = LoadDoc(c);
  const iota::clasp::ToyConfig config = iota::io::ToyFromToml(doc, &seed);
  if (c.seed) seed = *c.seed;
  std::vector<iota::clasp::PathwayRecord> records;
  iota::clasp::AttributionReport report;
  std::size_t layers = config.layers;
  if (!records_path.empty()) {
    records = iota::io::ReadPathways(records_path);
    Require(!records.empty(), ErrorKind::kInvalidArgument, "no pathway records in " + records_path);
    layers = records.front().pathway.size();
    report = iota::clasp::FlagOutliers(records, config.z_threshold);
  } else {
    auto result = iota::clasp::RunToyExperiment(config, seed);
    records = std::move(result.records);
    report = std::move(result.report);
  }
  Emit(OutDir(c, "clasp"), iota::io::ClaspOutputs(records, report, layers, records_path.empty()),
       iota::io::ToyToToml(config), "clasp", seed);
  std::cout << "flagged:";
  for (auto m : report.flagged) std::cout << " " << m;
  std::cout << "\n";
  return 0;
}

int RunSweep(const Common& c) {
  std::uint64_t seed = 1;
  const toml::table doc = LoadDoc(c);
  const iota::incentives::SweepConfig config = iota::io::SweepFromToml(doc, &seed);
  if (c.seed) seed = *c.seed;
  const auto cells = iota::incentives::StabilitySweep(config, seed);
  Emit(OutDir(c, "incentive-sweep"), iota::io::SweepOutputs(cells),
       iota::io::SweepToToml(config), "incentive-sweep", seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a pipelined, incentivized training swarm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", iota::io::kToolVersion);

  Common train_opts, bar_opts, clasp_opts, sweep_opts;
  auto* train = app.add_subcommand("train", "Run a swarm training scenario");
  AddCommon(train, train_opts);

  auto* bar = app.add_subcommand("bar-resilience", "Valid shard fraction under miner failures");
  AddCommon(bar, bar_opts);
  std::optional<std::size_t> n, k_max, trials;
  bar->add_option("--n", n, "Number of miners");
  bar->add_option("--k-max", k_max, "Largest failure count");
  bar->add_option("--trials", trials, "Failure draws per k");

  auto* clasp_cmd = app.add_subcommand("clasp", "Loss attribution over sampled pathways");
  AddCommon(clasp_cmd, clasp_opts);
  std::string records;
  clasp_cmd->add_option("--records", records, "Pathway CSV from a train run (skips the toy model)")
      ->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("incentive-sweep", "Incentive stability over decay/sync grid");
  AddCommon(sweep, sweep_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train) return RunTrain(train_opts);
    if (*bar) return RunResilience(bar_opts, n, k_max, trials);
    if (*clasp_cmd) return RunClasp(clasp_opts, records);
    if (*sweep) return RunSweep(sweep_opts);
  } catch (const iota::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kInvalidConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
