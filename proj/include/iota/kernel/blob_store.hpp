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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/network.hpp"

namespace iota::kernel {

using Bytes = std::vector<std::uint8_t>;

struct TransferMeter {
  std::uint64_t bytes_uploaded = 0;
  std::uint64_t bytes_downloaded = 0;

  friend bool operator==(const TransferMeter&, const TransferMeter&) = default;
};

struct PutReceipt {
  std::string key;
  std::uint64_t size = 0;
  double completion_time = 0.0;
};

struct PutOptions {
  bool overwrite = false;
};

// In-memory object store standing in for a shared bucket. Every completed
// put/get is charged to the acting participant.
class BlobStore {
 public:
  explicit BlobStore(NetworkModel model = {}) : model_(model) { model_.Validate(); }

  const NetworkModel& network() const { return model_; }

  PutReceipt Put(const std::string& actor, const std::string& key, Bytes bytes,
                 double now, PutOptions options = {}) {
    return Put(actor, key, std::move(bytes), now, model_, options);
  }

  PutReceipt Put(const std::string& actor, const std::string& key, Bytes bytes,
                 double now, const NetworkModel& link, PutOptions options = {}) {
    Require(!key.empty(), ErrorKind::kInvalidArgument, "blob key must be non-empty");
    auto it = objects_.find(key);
    if (it != objects_.end() && !options.overwrite) {
      Fail(ErrorKind::kKeyExists, key);
    }
    const auto size = static_cast<std::uint64_t>(bytes.size());
    if (it == objects_.end()) {
      objects_.emplace(key, std::move(bytes));
    } else {
      it->second = std::move(bytes);
    }
    meter_[actor].bytes_uploaded += size;
    total_put_bytes_ += size;
    return PutReceipt{key, size, now + TransferDuration(size, link)};
  }

  const Bytes& Get(const std::string& actor, const std::string& key) {
    auto it = objects_.find(key);
    if (it == objects_.end()) Fail(ErrorKind::kNotFound, key);
    meter_[actor].bytes_downloaded += it->second.size();
    return it->second;
  }

  bool Contains(const std::string& key) const { return objects_.count(key) != 0; }

  std::uint64_t SizeOf(const std::string& key) const {
    auto it = objects_.find(key);
    if (it == objects_.end()) Fail(ErrorKind::kNotFound, key);
    return it->second.size();
  }

  // Unmetered mutable access, for fault injection in tests and scenarios.
  Bytes& Tamper(const std::string& key) {
    auto it = objects_.find(key);
    if (it == objects_.end()) Fail(ErrorKind::kNotFound, key);
    return it->second;
  }

  TransferMeter MeterFor(const std::string& actor) const {
    auto it = meter_.find(actor);
    return it == meter_.end() ? TransferMeter{} : it->second;
  }

  const std::map<std::string, TransferMeter>& meters() const { return meter_; }

  std::uint64_t TotalUploaded() const {
    std::uint64_t total = 0;
    for (const auto& [actor, m] : meter_) total += m.bytes_uploaded;
    return total;
  }

  std::uint64_t total_put_bytes() const { return total_put_bytes_; }
  std::size_t object_count() const { return objects_.size(); }

 private:
  NetworkModel model_;
  std::map<std::string, Bytes> objects_;
  std::map<std::string, TransferMeter> meter_;
  std::uint64_t total_put_bytes_ = 0;
};

// epoch/{n}/layer/{l}/miner/{m}/{kind}
inline std::string BlobKey(std::uint64_t epoch, std::size_t layer, std::uint64_t miner,
                           const std::string& kind) {
  return "epoch/" + std::to_string(epoch) + "/layer/" + std::to_string(layer) + "/miner/" +
         std::to_string(miner) + "/" + kind;
}

namespace kind {
inline std::string Weights() { return "weights"; }
inline std::string Activations(const std::string& sample) { return "activations/" + sample; }
inline std::string Shard(std::size_t idx) { return "shard/" + std::to_string(idx); }
inline std::string Merged(std::size_t idx) { return "merged/" + std::to_string(idx); }
}  // namespace kind

}  // namespace iota::kernel
