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
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iota/butterfly/plan.hpp"
#include "iota/error.hpp"
#include "iota/kernel/blob_store.hpp"
#include "iota/kernel/codec.hpp"
#include "iota/kernel/network.hpp"

namespace iota::butterfly {

using Vector = std::vector<double>;
using ShardInputs = std::vector<std::span<const double>>;

// Reduces one shard. `anchor` is the pre-merge global slice; plain averaging
// ignores it, outer-optimizer style reducers step from it.
using Reducer =
    std::function<void(const ShardInputs& inputs, std::span<const double> anchor,
                       std::span<double> out)>;

inline void MeanReduce(const ShardInputs& inputs, std::span<const double>, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& in : inputs) {
    for (std::size_t e = 0; e < out.size(); ++e) out[e] += in[e];
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  for (double& v : out) v *= inv;
}

// Coordinate-wise median; tolerates a minority of arbitrary inputs.
inline void MedianReduce(const ShardInputs& inputs, std::span<const double>,
                         std::span<double> out) {
  std::vector<double> column(inputs.size());
  for (std::size_t e = 0; e < out.size(); ++e) {
    for (std::size_t m = 0; m < inputs.size(); ++m) column[m] = inputs[m][e];
    std::sort(column.begin(), column.end());
    const std::size_t n = column.size();
    out[e] = n % 2 == 1 ? column[n / 2] : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
}

// anchor + lr * (mean - anchor); lr = 1 is plain averaging.
inline Reducer OuterStepReducer(double outer_lr) {
  return [outer_lr](const ShardInputs& inputs, std::span<const double> anchor,
                    std::span<double> out) {
    MeanReduce(inputs, anchor, out);
    for (std::size_t e = 0; e < out.size(); ++e) out[e] = anchor[e] + outer_lr * (out[e] - anchor[e]);
  };
}

inline double MaxAbsDiff(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorKind::kShapeError, "reduction length mismatch");
  double worst = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) worst = std::max(worst, std::abs(a[e] - b[e]));
  return worst;
}

// 1 when the two reductions agree within `tolerance` (max-abs), otherwise
// their cosine similarity clamped to [0, 1].
inline double Agreement(std::span<const double> a, std::span<const double> b,
                        double tolerance = 1e-6) {
  if (MaxAbsDiff(a, b) <= tolerance) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    dot += a[e] * b[e];
    na += a[e] * a[e];
    nb += b[e] * b[e];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

class AgreementMatrix {
 public:
  explicit AgreementMatrix(std::size_t n = 0)
      : n_(n), entries_(n * n, std::numeric_limits<double>::quiet_NaN()) {}

  std::size_t n_miners() const { return n_; }
  bool defined(std::size_t i, std::size_t j) const { return !std::isnan(entries_[i * n_ + j]); }
  double at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  void Set(std::size_t i, std::size_t j, double value) {
    entries_[i * n_ + j] = value;
    entries_[j * n_ + i] = value;
  }

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

enum class ShardStatus { kValid, kRecovered, kInvalid, kLost };

inline const char* ShardStatusName(ShardStatus s) {
  switch (s) {
    case ShardStatus::kValid: return "valid";
    case ShardStatus::kRecovered: return "recovered";
    case ShardStatus::kInvalid: return "invalid";
    case ShardStatus::kLost: return "lost";
  }
  return "?";
}

// What each participant does during the merge. Deceptive assignees upload
// -tamper_scale times their honest reduction (sign-flip attack).
struct MergeRole {
  enum class Kind { kHonest, kFailed, kDeceptive };
  Kind kind = Kind::kHonest;
  double tamper_scale = 1.0;

  static MergeRole Honest() { return {}; }
  static MergeRole Failed() { return {Kind::kFailed, 1.0}; }
  static MergeRole Deceptive(double scale) { return {Kind::kDeceptive, scale}; }
  bool failed() const { return kind == Kind::kFailed; }
};

// kFallback: two disagreeing assignees invalidate the shard.
// kRecompute: the orchestrator recomputes the reduction and keeps the
// assignee that matches it.
enum class TieBreak { kFallback, kRecompute };

struct AllReduceOptions {
  std::uint64_t epoch = 0;
  std::size_t layer = 0;
  double now = 0.0;
  double agreement_tolerance = 1e-6;
  TieBreak tie_break = TieBreak::kFallback;
  kernel::NetworkModel link{};
  std::string orchestrator = "orchestrator";
};

struct AllReduceResult {
  Vector merged;
  std::vector<ShardStatus> status;
  AgreementMatrix agreement;
  std::vector<kernel::TransferMeter> miner_transfer;  // indexed like the participants
  kernel::TransferMeter orchestrator_transfer;
  std::vector<std::size_t> flagged;                   // participants named in disagreements
  double duration = 0.0;                              // sum over phases of the slowest miner

  std::size_t CountStatus(ShardStatus s) const {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
  }
  double ValidFraction() const {
    if (status.empty()) return 1.0;
    return static_cast<double>(CountStatus(ShardStatus::kValid) +
                               CountStatus(ShardStatus::kRecovered)) /
           static_cast<double>(status.size());
  }
};

inline std::string MinerActor(std::uint64_t miner_id) { return "miner/" + std::to_string(miner_id); }

// Pair-redundant sharded merge through the blob store.
//
// Every live participant uploads each shard of its payload; both assignees
// of a shard download that slice from every live upload, reduce it and upload
// the result; the orchestrator compares duplicate reductions; every live
// participant then downloads one accepted copy of each shard. Lost or invalid
// shards keep the `fallback` (pre-merge) slice.
template <class Codec = kernel::Float32Codec>
AllReduceResult RunAllReduce(kernel::BlobStore& store, const ShardPlan& plan,
                             const std::vector<Vector>& payloads,
                             const std::vector<std::uint64_t>& miner_ids,
                             const std::vector<MergeRole>& roles, std::span<const double> fallback,
                             const Reducer& reducer, const AllReduceOptions& options = {}) {
  const std::size_t n = plan.n_miners();
  Require(payloads.size() == n && miner_ids.size() == n && roles.size() == n,
          ErrorKind::kShapeError, "participants do not match the plan");
  for (const auto& p : payloads) {
    Require(p.size() == plan.payload_len, ErrorKind::kShapeError,
            "payload length differs from plan");
  }
  Require(fallback.size() == plan.payload_len, ErrorKind::kShapeError,
          "fallback length differs from plan");
  Require(plan.bytes_per_weight == Codec::kBytesPerValue, ErrorKind::kShapeError,
          "plan bytes_per_weight does not match the codec");

  std::vector<std::string> actors(n);
  for (std::size_t m = 0; m < n; ++m) actors[m] = MinerActor(miner_ids[m]);
  std::vector<kernel::TransferMeter> before(n);
  for (std::size_t m = 0; m < n; ++m) before[m] = store.MeterFor(actors[m]);
  const kernel::TransferMeter orch_before = store.MeterFor(options.orchestrator);

  auto shard_key = [&](std::size_t m, std::size_t s) {
    return kernel::BlobKey(options.epoch, options.layer, miner_ids[m], kernel::kind::Shard(s));
  };
  auto merged_key = [&](std::size_t m, std::size_t s) {
    return kernel::BlobKey(options.epoch, options.layer, miner_ids[m], kernel::kind::Merged(s));
  };
  auto slice = [&](std::span<const double> v, std::size_t s) {
    return v.subspan(plan.start[s], plan.length[s]);
  };
  const kernel::PutOptions overwrite{true};
  auto phase_time = [&](const std::vector<std::uint64_t>& bytes) {
    std::uint64_t worst = 0;
    for (auto b : bytes) worst = std::max(worst, b);
    return kernel::TransferDuration(worst, options.link);
  };

  AllReduceResult result;
  result.status.assign(plan.shard_count(), ShardStatus::kLost);
  result.agreement = AgreementMatrix(n);

  // Sidecar with the byte ranges, written once by the orchestrator.
  {
    const std::string meta = plan.Metadata().ToCsv();
    store.Put(options.orchestrator,
              "epoch/" + std::to_string(options.epoch) + "/layer/" +
                  std::to_string(options.layer) + "/shard_meta",
              kernel::Bytes(meta.begin(), meta.end()), options.now, overwrite);
  }

  // 1. upload
  std::vector<std::uint64_t> phase(n, 0);
  for (std::size_t m = 0; m < n; ++m) {
    if (roles[m].failed()) continue;
    for (std::size_t s = 0; s < plan.shard_count(); ++s) {
      auto receipt = store.Put(actors[m], shard_key(m, s),
                               Codec::Encode(slice(payloads[m], s)), options.now, overwrite);
      phase[m] += receipt.size;
    }
  }
  result.duration += phase_time(phase);

  // Downloads every live upload of shard s, decoded.
  auto gather = [&](const std::string& actor, std::size_t s) {
    std::vector<Vector> pieces;
    for (std::size_t src = 0; src < n; ++src) {
      if (roles[src].failed()) continue;
      pieces.push_back(Codec::Decode(store.Get(actor, shard_key(src, s))));
    }
    return pieces;
  };
  auto reduce = [&](const std::vector<Vector>& pieces, std::size_t s) {
    ShardInputs inputs(pieces.begin(), pieces.end());
    Vector out(plan.length[s]);
    reducer(inputs, slice(fallback, s), out);
    return out;
  };

  // 2. reduce: download 2W, upload 2W/N per miner
  std::vector<std::uint64_t> down(n, 0), up(n, 0);
  for (std::size_t s = 0; s < plan.shard_count(); ++s) {
    for (std::size_t a : {plan.assignment[s].i, plan.assignment[s].j}) {
      if (roles[a].failed()) continue;
      const auto meter0 = store.MeterFor(actors[a]).bytes_downloaded;
      Vector r = reduce(gather(actors[a], s), s);
      down[a] += store.MeterFor(actors[a]).bytes_downloaded - meter0;
      if (roles[a].kind == MergeRole::Kind::kDeceptive) {
        for (double& v : r) v *= -roles[a].tamper_scale;
      }
      up[a] += store.Put(actors[a], merged_key(a, s), Codec::Encode(r), options.now, overwrite).size;
    }
  }
  result.duration += phase_time(down) + phase_time(up);

  // 3. orchestrator verification and assembly
  result.merged.assign(fallback.begin(), fallback.end());
  std::vector<std::size_t> source(plan.shard_count(), n);  // accepted assignee, n = none
  std::vector<bool> flagged(n, false);
  for (std::size_t s = 0; s < plan.shard_count(); ++s) {
    const auto [i, j] = plan.assignment[s];
    const bool live_i = !roles[i].failed(), live_j = !roles[j].failed();
    if (!live_i && !live_j) {
      result.status[s] = ShardStatus::kLost;
      continue;
    }
    if (live_i != live_j) {
      source[s] = live_i ? i : j;
      result.status[s] = ShardStatus::kValid;
      continue;
    }
    const Vector ri = Codec::Decode(store.Get(options.orchestrator, merged_key(i, s)));
    const Vector rj = Codec::Decode(store.Get(options.orchestrator, merged_key(j, s)));
    const double agree = Agreement(ri, rj, options.agreement_tolerance);
    result.agreement.Set(i, j, agree);
    if (MaxAbsDiff(ri, rj) <= options.agreement_tolerance) {
      source[s] = i;
      result.status[s] = ShardStatus::kValid;
      continue;
    }
    result.status[s] = ShardStatus::kInvalid;
    if (options.tie_break == TieBreak::kRecompute) {
      const Vector truth = reduce(gather(options.orchestrator, s), s);
      const Vector quantized = Codec::Decode(Codec::Encode(truth));
      const bool ok_i = MaxAbsDiff(ri, quantized) <= options.agreement_tolerance;
      const bool ok_j = MaxAbsDiff(rj, quantized) <= options.agreement_tolerance;
      if (ok_i != ok_j) {
        source[s] = ok_i ? i : j;
        result.status[s] = ShardStatus::kRecovered;
        flagged[ok_i ? j : i] = true;
        continue;
      }
    }
    flagged[i] = flagged[j] = true;
  }

  // 4. every live participant downloads one accepted copy of each shard
  std::vector<std::uint64_t> final_down(n, 0);
  std::vector<bool> assembled(plan.shard_count(), false);
  for (std::size_t m = 0; m < n; ++m) {
    if (roles[m].failed()) continue;
    for (std::size_t s = 0; s < plan.shard_count(); ++s) {
      if (source[s] == n) continue;
      const auto& bytes = store.Get(actors[m], merged_key(source[s], s));
      final_down[m] += bytes.size();
      if (!assembled[s]) {
        const Vector piece = Codec::Decode(bytes);
        std::copy(piece.begin(), piece.end(),
                  result.merged.begin() + static_cast<std::ptrdiff_t>(plan.start[s]));
        assembled[s] = true;
      }
    }
  }
  result.duration += phase_time(final_down);

  for (std::size_t m = 0; m < n; ++m) {
    if (flagged[m]) result.flagged.push_back(m);
  }
  result.miner_transfer.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto after = store.MeterFor(actors[m]);
    result.miner_transfer[m] = {after.bytes_uploaded - before[m].bytes_uploaded,
                                after.bytes_downloaded - before[m].bytes_downloaded};
  }
  const auto orch_after = store.MeterFor(options.orchestrator);
  result.orchestrator_transfer = {orch_after.bytes_uploaded - orch_before.bytes_uploaded,
                                  orch_after.bytes_downloaded - orch_before.bytes_downloaded};
  return result;
}

}  // namespace iota::butterfly
