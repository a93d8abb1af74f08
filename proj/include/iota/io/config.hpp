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

// TOML configuration for the simulator. Unknown keys are rejected so typos
// surface as configuration errors instead of silently falling back.

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "iota/clasp/clasp.hpp"
#include "iota/error.hpp"
#include "iota/incentives/stability.hpp"
#include "iota/orchestrator/scenario.hpp"

namespace iota::io {

struct ResilienceConfig {
  std::size_t n = 50;
  std::size_t k_max = 25;
  std::size_t trials = 1000;

  void Validate() const {
    Require(n >= 2, ErrorKind::kInvalidConfig, "bar.n must be >= 2");
    Require(k_max <= n, ErrorKind::kInvalidConfig, "bar.k_max must be <= bar.n");
    Require(trials >= 1, ErrorKind::kInvalidConfig, "bar.trials must be >= 1");
  }
};

namespace detail {

class Reader {
 public:
  Reader(const toml::table* table, std::string where) : table_(table), where_(std::move(where)) {}

  bool present() const { return table_ != nullptr; }

  template <class T>
  void Opt(const char* key, T& out) {
    const toml::node* node = Find(key);
    if (node == nullptr) return;
    Assign(*node, key, out);
  }

  Reader Sub(const char* key) {
    const toml::node* node = Find(key);
    if (node == nullptr) return Reader(nullptr, Path(key));
    const auto* t = node->as_table();
    Require(t != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be a table");
    return Reader(t, Path(key));
  }

  std::vector<Reader> SubArray(const char* key) {
    std::vector<Reader> out;
    const toml::node* node = Find(key);
    if (node == nullptr) return out;
    const auto* arr = node->as_array();
    Require(arr != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const auto* t = (*arr)[i].as_table();
      Require(t != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be an array of tables");
      out.emplace_back(t, Path(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  // Marks a key as understood without reading it.
  void Allow(const char* key) { seen_.insert(key); }

  void Finish() const {
    if (table_ == nullptr) return;
    for (const auto& [k, v] : *table_) {
      Require(seen_.count(std::string(k.str())) != 0, ErrorKind::kInvalidConfig,
              "unknown key " + Path(std::string(k.str()).c_str()));
    }
  }

  std::string Path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

 private:
  const toml::node* Find(const char* key) {
    seen_.insert(key);
    if (table_ == nullptr) return nullptr;
    return table_->get(key);
  }

  void Assign(const toml::node& node, const char* key, double& out) {
    auto v = node.value<double>();
    Require(v.has_value() && (node.is_number()), ErrorKind::kInvalidConfig,
            Path(key) + " must be a number");
    out = *v;
  }
  void Assign(const toml::node& node, const char* key, std::uint64_t& out) {
    const auto v = node.as_integer();
    Require(v != nullptr && v->get() >= 0, ErrorKind::kInvalidConfig,
            Path(key) + " must be a non-negative integer");
    out = static_cast<std::uint64_t>(v->get());
  }
  void Assign(const toml::node& node, const char* key, std::string& out) {
    const auto v = node.as_string();
    Require(v != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be a string");
    out = v->get();
  }
  void Assign(const toml::node& node, const char* key, std::vector<double>& out) {
    const auto* arr = node.as_array();
    Require(arr != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be an array");
    out.clear();
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      Require(v.has_value() && el.is_number(), ErrorKind::kInvalidConfig,
              Path(key) + " must hold numbers");
      out.push_back(*v);
    }
  }
  void Assign(const toml::node& node, const char* key, std::vector<std::uint64_t>& out) {
    const auto* arr = node.as_array();
    Require(arr != nullptr, ErrorKind::kInvalidConfig, Path(key) + " must be an array");
    out.clear();
    for (const auto& el : *arr) {
      const auto* v = el.as_integer();
      Require(v != nullptr && v->get() >= 0, ErrorKind::kInvalidConfig,
              Path(key) + " must hold non-negative integers");
      out.push_back(static_cast<std::uint64_t>(v->get()));
    }
  }

  const toml::table* table_;
  std::string where_;
  std::set<std::string> seen_;
};

inline orchestrator::HonestyProfile ReadProfile(Reader& r) {
  // Only the chosen profile's own parameter is accepted; the caller's Finish()
  // rejects the rest.
  std::string name = "honest";
  r.Opt("profile", name);
  if (name == "honest") return orchestrator::Honest{};
  if (name == "dropout") {
    orchestrator::Dropout d;
    r.Opt("p_fail", d.p_fail);
    return d;
  }
  if (name == "deceptive") {
    orchestrator::Deceptive d;
    r.Opt("tamper_scale", d.tamper_scale);
    return d;
  }
  if (name == "lazy") {
    orchestrator::Lazy l;
    r.Opt("skip_probability", l.skip_probability);
    return l;
  }
  Fail(ErrorKind::kInvalidConfig,
       r.Path("profile") + " must be honest, dropout, deceptive or lazy");
}

inline toml::table WriteProfile(const orchestrator::HonestyProfile& p) {
  toml::table t;
  t.insert("profile", orchestrator::ProfileName(p));
  if (auto* d = std::get_if<orchestrator::Dropout>(&p)) t.insert("p_fail", d->p_fail);
  if (auto* d = std::get_if<orchestrator::Deceptive>(&p)) t.insert("tamper_scale", d->tamper_scale);
  if (auto* l = std::get_if<orchestrator::Lazy>(&p)) t.insert("skip_probability", l->skip_probability);
  return t;
}

template <class T>
toml::array Array(const std::vector<T>& values) {
  toml::array a;
  for (const auto& v : values) {
    if constexpr (std::is_integral_v<T>) {
      a.push_back(static_cast<std::int64_t>(v));
    } else {
      a.push_back(v);
    }
  }
  return a;
}

inline std::int64_t I(std::uint64_t v) { return static_cast<std::int64_t>(v); }

}  // namespace detail

inline toml::table ParseFile(const std::filesystem::path& path) {
  try {
    return toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ": " << e.description() << " at line " << e.source().begin.line;
    Fail(ErrorKind::kInvalidConfig, msg.str());
  }
}

inline toml::table ParseString(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    Fail(ErrorKind::kInvalidConfig, msg.str());
  }
}

// Top-level tables belonging to other subcommands are accepted and ignored,
// so one file can configure several runs.
inline constexpr const char* kSections[] = {"model", "swarm",      "network", "merge", "validator",
                                            "incentives", "clasp", "sweep",   "bar",   "manifest"};

inline void CheckTopLevel(detail::Reader& root) {
  root.Allow("seed");
  root.Allow("epochs");
  for (const char* s : kSections) root.Allow(s);
  root.Finish();
}

inline orchestrator::ScenarioConfig ScenarioFromToml(const toml::table& doc) {
  orchestrator::ScenarioConfig c;
  detail::Reader root(&doc, "");
  root.Opt("seed", c.seed);
  std::uint64_t epochs = c.epochs;
  root.Opt("epochs", epochs);
  c.epochs = epochs;

  auto model = root.Sub("model");
  std::vector<std::uint64_t> dims(c.dims.begin(), c.dims.end());
  model.Opt("dims", dims);
  c.dims.assign(dims.begin(), dims.end());
  std::uint64_t micro = c.micro_batch;
  model.Opt("micro_batch", micro);
  c.micro_batch = micro;
  model.Opt("learning_rate", c.learning_rate);
  model.Opt("noise", c.noise);
  model.Finish();

  auto swarm = root.Sub("swarm");
  std::uint64_t mpl = c.miners_per_layer, stages = c.compressed_stages_per_epoch,
                slots = c.pipeline_slots;
  swarm.Opt("miners_per_layer", mpl);
  swarm.Opt("b_min", c.b_min);
  swarm.Opt("trigger_fraction", c.trigger_fraction);
  swarm.Opt("compressed_stages_per_epoch", stages);
  swarm.Opt("pipeline_slots", slots);
  swarm.Opt("compute_seconds", c.compute_seconds);
  swarm.Opt("max_batches_per_epoch", c.max_batches_per_epoch);
  c.miners_per_layer = mpl;
  c.compressed_stages_per_epoch = stages;
  c.pipeline_slots = slots;
  for (auto& o : swarm.SubArray("override")) {
    orchestrator::MinerOverride ov;
    std::uint64_t layer = 0, slot = 0;
    o.Opt("layer", layer);
    o.Opt("slot", slot);
    o.Opt("speed", ov.speed);
    ov.layer = layer;
    ov.slot = slot;
    ov.profile = detail::ReadProfile(o);
    o.Finish();
    c.overrides.push_back(ov);
  }
  for (auto& j : swarm.SubArray("join")) {
    orchestrator::JoinEvent ev;
    j.Opt("epoch", ev.epoch);
    j.Opt("speed", ev.speed);
    ev.profile = detail::ReadProfile(j);
    j.Finish();
    c.joins.push_back(ev);
  }
  swarm.Finish();

  auto net = root.Sub("network");
  double mbps = c.network.bandwidth_bps / 1e6;
  net.Opt("bandwidth_mbps", mbps);
  c.network.bandwidth_bps = kernel::MbpsToBps(mbps);
  net.Opt("compression_ratio", c.network.compression_ratio);
  net.Finish();

  auto merge = root.Sub("merge");
  merge.Opt("reducer", c.reducer);
  merge.Opt("outer_lr", c.outer_lr);
  merge.Opt("agreement_tolerance", c.agreement_tolerance);
  std::string tie = c.tie_break == butterfly::TieBreak::kRecompute ? "recompute" : "fallback";
  merge.Opt("tie_break", tie);
  Require(tie == "fallback" || tie == "recompute", ErrorKind::kInvalidConfig,
          "merge.tie_break must be fallback or recompute");
  c.tie_break = tie == "recompute" ? butterfly::TieBreak::kRecompute : butterfly::TieBreak::kFallback;
  merge.Finish();

  auto val = root.Sub("validator");
  val.Opt("similarity_threshold", c.validator.similarity_threshold);
  val.Opt("magnitude_tolerance", c.validator.magnitude_tolerance);
  val.Opt("replay_fraction", c.validator.replay_fraction);
  val.Finish();

  auto inc = root.Sub("incentives");
  inc.Opt("gamma_seconds", c.gamma);
  inc.Finish();

  CheckTopLevel(root);
  c.Validate();
  return c;
}

inline toml::table ScenarioToToml(const orchestrator::ScenarioConfig& c) {
  using detail::I;
  toml::table swarm{{"miners_per_layer", I(c.miners_per_layer)},
                    {"b_min", I(c.b_min)},
                    {"trigger_fraction", c.trigger_fraction},
                    {"compressed_stages_per_epoch", I(c.compressed_stages_per_epoch)},
                    {"pipeline_slots", I(c.pipeline_slots)},
                    {"compute_seconds", c.compute_seconds},
                    {"max_batches_per_epoch", I(c.max_batches_per_epoch)}};
  if (!c.overrides.empty()) {
    toml::array arr;
    for (const auto& o : c.overrides) {
      toml::table t = detail::WriteProfile(o.profile);
      t.insert("layer", I(o.layer));
      t.insert("slot", I(o.slot));
      t.insert("speed", o.speed);
      arr.push_back(std::move(t));
    }
    swarm.insert("override", std::move(arr));
  }
  if (!c.joins.empty()) {
    toml::array arr;
    for (const auto& j : c.joins) {
      toml::table t = detail::WriteProfile(j.profile);
      t.insert("epoch", I(j.epoch));
      t.insert("speed", j.speed);
      arr.push_back(std::move(t));
    }
    swarm.insert("join", std::move(arr));
  }
  return toml::table{
      {"seed", I(c.seed)},
      {"epochs", I(c.epochs)},
      {"model", toml::table{{"dims", detail::Array(c.dims)},
                            {"micro_batch", I(c.micro_batch)},
                            {"learning_rate", c.learning_rate},
                            {"noise", c.noise}}},
      {"swarm", std::move(swarm)},
      {"network", toml::table{{"bandwidth_mbps", c.network.bandwidth_bps / 1e6},
                              {"compression_ratio", c.network.compression_ratio}}},
      {"merge", toml::table{{"reducer", c.reducer},
                            {"outer_lr", c.outer_lr},
                            {"agreement_tolerance", c.agreement_tolerance},
                            {"tie_break", c.tie_break == butterfly::TieBreak::kRecompute
                                              ? "recompute"
                                              : "fallback"}}},
      {"validator", toml::table{{"similarity_threshold", c.validator.similarity_threshold},
                                {"magnitude_tolerance", c.validator.magnitude_tolerance},
                                {"replay_fraction", c.validator.replay_fraction}}},
      {"incentives", toml::table{{"gamma_seconds", c.gamma}}},
  };
}

inline clasp::ToyConfig ToyFromToml(const toml::table& doc, std::uint64_t* seed = nullptr) {
  clasp::ToyConfig c;
  detail::Reader root(&doc, "");
  if (seed != nullptr) root.Opt("seed", *seed);
  auto t = root.Sub("clasp");
  std::uint64_t layers = c.layers, mpl = c.miners_per_layer;
  t.Opt("layers", layers);
  t.Opt("miners_per_layer", mpl);
  t.Opt("samples", c.samples);
  t.Opt("z_threshold", c.z_threshold);
  t.Opt("clean_mean", c.loss.clean_mean);
  t.Opt("clean_std", c.loss.clean_std);
  t.Opt("penalty", c.loss.penalty);
  c.layers = layers;
  c.miners_per_layer = mpl;
  t.Allow("malicious");
  if (const auto* arr = doc["clasp"]["malicious"].as_array()) {
    c.malicious.clear();
    for (const auto& el : *arr) {
      const auto* pair = el.as_array();
      Require(pair != nullptr && pair->size() == 2 && (*pair)[0].is_integer() &&
                  (*pair)[1].is_integer(),
              ErrorKind::kInvalidConfig, "clasp.malicious must be a list of [layer, slot] pairs");
      const auto l = (*pair)[0].as_integer()->get(), s = (*pair)[1].as_integer()->get();
      Require(l >= 0 && s >= 0, ErrorKind::kInvalidConfig, "clasp.malicious entries must be >= 0");
      c.malicious.emplace_back(static_cast<std::size_t>(l), static_cast<std::size_t>(s));
    }
  }
  t.Finish();
  CheckTopLevel(root);
  Require(c.z_threshold > 0.0, ErrorKind::kInvalidConfig, "clasp.z_threshold must be > 0");
  Require(c.loss.clean_std >= 0.0 && c.loss.penalty >= 0.0, ErrorKind::kInvalidConfig,
          "clasp loss parameters must be >= 0");
  Require(c.layers >= 1 && c.miners_per_layer >= 1 && c.samples >= 1, ErrorKind::kInvalidConfig,
          "clasp grid and sample count must be >= 1");
  clasp::ToyMaliciousSet(c);
  return c;
}

inline toml::table ToyToToml(const clasp::ToyConfig& c) {
  using detail::I;
  toml::array malicious;
  for (const auto& [l, s] : c.malicious) malicious.push_back(toml::array{I(l), I(s)});
  return toml::table{{"clasp", toml::table{{"layers", I(c.layers)},
                                           {"miners_per_layer", I(c.miners_per_layer)},
                                           {"samples", I(c.samples)},
                                           {"z_threshold", c.z_threshold},
                                           {"clean_mean", c.loss.clean_mean},
                                           {"clean_std", c.loss.clean_std},
                                           {"penalty", c.loss.penalty},
                                           {"malicious", std::move(malicious)}}}};
}

inline incentives::SweepConfig SweepFromToml(const toml::table& doc, std::uint64_t* seed = nullptr) {
  incentives::SweepConfig c;
  c.gammas = {3600, 7200, 14400, 28800};
  c.sync_intervals = {600, 1200, 1800, 3600};
  c.horizon = 3600.0 * 5000;
  c.score_noise = 0.1;
  detail::Reader root(&doc, "");
  if (seed != nullptr) root.Opt("seed", *seed);
  auto t = root.Sub("sweep");
  t.Opt("gammas", c.gammas);
  t.Opt("sync_intervals", c.sync_intervals);
  t.Opt("horizon", c.horizon);
  t.Opt("score_noise", c.score_noise);
  std::uint64_t spi = c.samples_per_interval;
  t.Opt("samples_per_interval", spi);
  c.samples_per_interval = spi;
  t.Finish();
  CheckTopLevel(root);
  Require(!c.gammas.empty() && !c.sync_intervals.empty(), ErrorKind::kInvalidConfig,
          "sweep grids must be non-empty");
  for (double g : c.gammas) Require(g > 0.0, ErrorKind::kInvalidConfig, "sweep.gammas must be > 0");
  for (double t_s : c.sync_intervals) {
    Require(t_s > 0.0, ErrorKind::kInvalidConfig, "sweep.sync_intervals must be > 0");
  }
  Require(c.score_noise >= 0.0, ErrorKind::kInvalidConfig, "sweep.score_noise must be >= 0");
  Require(c.samples_per_interval >= 1, ErrorKind::kInvalidConfig,
          "sweep.samples_per_interval must be >= 1");
  return c;
}

inline toml::table SweepToToml(const incentives::SweepConfig& c) {
  using detail::I;
  return toml::table{{"sweep", toml::table{{"gammas", detail::Array(c.gammas)},
                                           {"sync_intervals", detail::Array(c.sync_intervals)},
                                           {"horizon", c.horizon},
                                           {"score_noise", c.score_noise},
                                           {"samples_per_interval", I(c.samples_per_interval)}}}};
}

inline ResilienceConfig ResilienceFromToml(const toml::table& doc, std::uint64_t* seed = nullptr) {
  ResilienceConfig c;
  detail::Reader root(&doc, "");
  if (seed != nullptr) root.Opt("seed", *seed);
  auto t = root.Sub("bar");
  std::uint64_t n = c.n, k = c.k_max, trials = c.trials;
  t.Opt("n", n);
  t.Opt("k_max", k);
  t.Opt("trials", trials);
  c.n = n;
  c.k_max = k;
  c.trials = trials;
  t.Finish();
  CheckTopLevel(root);
  c.Validate();
  return c;
}

inline toml::table ResilienceToToml(const ResilienceConfig& c) {
  using detail::I;
  return toml::table{
      {"bar", toml::table{{"n", I(c.n)}, {"k_max", I(c.k_max)}, {"trials", I(c.trials)}}}};
}

inline constexpr const char* kToolVersion = "0.1.0";

// Resolved config plus a [manifest] table; loading it back reproduces the run.
inline std::string ManifestText(toml::table config, const std::string& command, std::uint64_t seed,
                                const std::vector<std::string>& outputs) {
  config.insert_or_assign("seed", detail::I(seed));
  toml::array files;
  for (const auto& f : outputs) files.push_back(f);
  config.insert_or_assign("manifest", toml::table{{"command", command},
                                                  {"tool", "iota-sim"},
                                                  {"version", kToolVersion},
                                                  {"outputs", std::move(files)}});
  std::ostringstream out;
  out << config << '\n';
  return out.str();
}

}  // namespace iota::io
