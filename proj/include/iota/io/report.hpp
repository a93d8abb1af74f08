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

// Tabular and chart outputs for each command, keyed by file name.

#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "iota/butterfly/analytics.hpp"
#include "iota/clasp/clasp.hpp"
#include "iota/incentives/stability.hpp"
#include "iota/io/csv.hpp"
#include "iota/io/svg.hpp"
#include "iota/orchestrator/scenario.hpp"

namespace iota::io {

using Outputs = std::map<std::string, std::string>;

inline std::string Bool(bool b) { return b ? "1" : "0"; }

inline std::string PathwaysCsv(const std::vector<clasp::PathwayRecord>& records, std::size_t layers) {
  std::vector<std::string> header{"sample_k"};
  for (std::size_t l = 0; l < layers; ++l) header.push_back("layer" + std::to_string(l) + "_miner");
  header.push_back("loss");
  CsvWriter w(header);
  for (const auto& r : records) {
    std::vector<std::string> row{Num(r.sample_k)};
    for (auto m : r.pathway) row.push_back(Num(m));
    row.push_back(Num(r.loss));
    w.Row(row);
  }
  return w.str();
}

inline std::vector<clasp::PathwayRecord> ReadPathways(const std::filesystem::path& path) {
  const CsvTable t = ReadCsv(path);
  const std::size_t k_col = t.Column("sample_k");
  const std::size_t loss_col = t.Column("loss");
  std::vector<std::size_t> layer_cols;
  for (std::size_t l = 0;; ++l) {
    const std::string name = "layer" + std::to_string(l) + "_miner";
    bool found = false;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (t.header[i] == name) {
        layer_cols.push_back(i);
        found = true;
      }
    }
    if (!found) break;
  }
  Require(!layer_cols.empty(), ErrorKind::kInvalidArgument, "pathway csv has no layer columns");
  std::vector<clasp::PathwayRecord> out;
  for (const auto& row : t.rows) {
    clasp::PathwayRecord r;
    r.sample_k = ParseU64(row[k_col]);
    for (auto c : layer_cols) r.pathway.push_back(ParseU64(row[c]));
    r.loss = ParseDouble(row[loss_col]);
    out.push_back(std::move(r));
  }
  return out;
}

inline Outputs ScenarioOutputs(const orchestrator::ScenarioReport& report, std::size_t layers) {
  Outputs out;
  {
    CsvWriter w({"step", "epoch", "batch_id", "loss", "sim_time"});
    for (const auto& p : report.losses) {
      w.Row({Num(p.step), Num(p.epoch), Num(p.batch_id), Num(p.loss), Num(p.sim_time)});
    }
    out["loss.csv"] = w.str();
  }
  {
    CsvWriter w({"epoch", "b_eff", "b_sum", "qualifying", "active", "dispatched", "completed",
                 "dropped", "training_end", "sync_end", "epoch_end"});
    for (const auto& e : report.epochs) {
      w.Row({Num(e.epoch), Num(e.b_eff), Num(e.b_sum), Num(e.qualifying), Num(e.active),
             Num(e.dispatched), Num(e.completed), Num(e.dropped), Num(e.training_end),
             Num(e.sync_end), Num(e.epoch_end)});
    }
    out["beff.csv"] = w.str();
  }
  {
    CsvWriter w({"epoch", "stage", "actor", "bytes_up", "bytes_down", "wire_up", "wire_down"});
    for (const auto& t : report.transfers) {
      w.Row({Num(t.epoch), t.stage, t.actor, Num(t.bytes_up), Num(t.bytes_down), Num(t.wire_up),
             Num(t.wire_down)});
    }
    out["transfers.csv"] = w.str();
  }
  {
    CsvWriter w({"epoch", "stage", "layer", "participants", "failed", "shards", "valid",
                 "recovered", "invalid", "lost", "flagged", "duration"});
    for (const auto& m : report.merges) {
      std::string flagged;
      for (auto id : m.flagged) flagged += (flagged.empty() ? "" : ";") + Num(id);
      w.Row({Num(m.epoch), m.stage, Num(m.layer), Num(m.participants), Num(m.failed),
             Num(m.shards), Num(m.valid), Num(m.recovered), Num(m.invalid), Num(m.lost), flagged,
             Num(m.duration)});
    }
    out["merges.csv"] = w.str();
  }
  {
    CsvWriter w({"epoch", "validator", "miner", "min_similarity", "passed", "score", "sim_time"});
    for (const auto& v : report.verdicts) {
      w.Row({Num(v.epoch), v.validator, Num(v.miner), Num(v.min_similarity), Bool(v.passed),
             Num(v.score), Num(v.sim_time)});
    }
    out["verdicts.csv"] = w.str();
  }
  {
    const auto shares = report.ledger.NormalizedShares(report.end_time);
    CsvWriter w({"miner", "layer", "profile", "incentive", "share", "live_scores"});
    for (const auto& m : report.miners) {
      const auto it = shares.find(m.miner_id);
      w.Row({Num(m.miner_id), Num(m.layer), orchestrator::ProfileName(m.profile),
             Num(report.ledger.Incentive(m.miner_id, report.end_time)),
             Num(it == shares.end() ? 0.0 : it->second),
             Num(report.ledger.LiveCount(m.miner_id, report.end_time))});
    }
    out["incentives.csv"] = w.str();
  }
  out["pathways.csv"] = PathwaysCsv(report.pathways, layers);

  Series loss{"loss", {}};
  for (const auto& p : report.losses) loss.points.emplace_back(static_cast<double>(p.step), p.loss);
  out["loss.svg"] = LineChart("Training loss", "step", "loss", {loss}, true);
  std::vector<Bar> bars;
  for (const auto& m : report.miners) {
    bars.push_back({"miner " + Num(m.miner_id) + " (" + orchestrator::ProfileName(m.profile) + ")",
                    report.ledger.Incentive(m.miner_id, report.end_time),
                    !std::holds_alternative<orchestrator::Honest>(m.profile)});
  }
  out["incentives.svg"] = BarChart("Incentive per miner at end of run", "incentive", bars);
  return out;
}

inline Outputs ResilienceOutputs(const std::vector<butterfly::ResilienceRow>& rows) {
  CsvWriter w({"N", "k", "analytic_fraction", "empirical_fraction"});
  Series analytic{"analytic", {}}, empirical{"empirical", {}};
  for (const auto& r : rows) {
    w.Row({Num(r.n), Num(r.k), Num(r.analytic_fraction), Num(r.empirical_fraction)});
    analytic.points.emplace_back(static_cast<double>(r.k), r.analytic_fraction);
    empirical.points.emplace_back(static_cast<double>(r.k), r.empirical_fraction);
  }
  return {{"resilience.csv", w.str()},
          {"resilience.svg",
           LineChart("Valid shard fraction vs failed miners", "failed miners k", "valid fraction",
                     {analytic, empirical})}};
}

inline Outputs ClaspOutputs(const std::vector<clasp::PathwayRecord>& records,
                            const clasp::AttributionReport& report, std::size_t layers,
                            bool include_records) {
  Outputs out;
  if (include_records) out["records.csv"] = PathwaysCsv(records, layers);
  CsvWriter w({"miner", "layer", "count", "avg_loss", "z", "flagged"});
  std::vector<Bar> bars;
  for (const auto& r : report.rows) {
    w.Row({Num(r.miner), Num(r.layer), Num(r.count), Num(r.avg_loss), Num(r.z), Bool(r.flagged)});
  }
  for (const auto& r : report.SortedByZ()) bars.push_back({"miner " + Num(r.miner), r.z, r.flagged});
  out["report.csv"] = w.str();
  out["clasp.svg"] = BarChart("Per-miner loss z-score", "z", bars, report.threshold);
  return out;
}

inline Outputs SweepOutputs(const std::vector<incentives::SweepCell>& cells) {
  CsvWriter w({"gamma", "T_s", "n_scores_expected", "n_scores_measured", "cv"});
  std::map<double, std::size_t> col, row;
  for (const auto& c : cells) {
    w.Row({Num(c.gamma), Num(c.sync_interval), Num(c.n_scores_expected), Num(c.n_scores_measured),
           Num(c.cv)});
    col.emplace(c.gamma, 0);
    row.emplace(c.sync_interval, 0);
  }
  std::vector<std::string> columns, rows;
  for (auto& [g, i] : col) {
    i = columns.size();
    columns.push_back(Num(g));
  }
  for (auto& [ts, i] : row) {
    i = rows.size();
    rows.push_back(Num(ts));
  }
  std::vector<std::vector<double>> grid(rows.size(), std::vector<double>(columns.size(), 0.0));
  for (const auto& c : cells) grid[row[c.sync_interval]][col[c.gamma]] = c.cv;
  return {{"sweep.csv", w.str()},
          {"sweep.svg", Heatmap("Incentive coefficient of variation", "gamma (s)", "T_s (s)",
                                columns, rows, grid)}};
}

inline void WriteOutputs(const std::filesystem::path& dir, const Outputs& outputs) {
  for (const auto& [name, text] : outputs) CsvWriter::WriteFile(dir / name, text);
}

}  // namespace iota::io
