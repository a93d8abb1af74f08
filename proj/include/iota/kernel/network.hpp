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

#include "iota/error.hpp"

namespace iota::kernel {

// Mbps is decimal (10^6 bit/s).
constexpr double MbpsToBps(double mbps) { return mbps * 1e6; }

struct NetworkModel {
  double bandwidth_bps = MbpsToBps(100.0);
  // Pure divisor on payload bits; codec CPU cost is not modelled.
  double compression_ratio = 1.0;

  void Validate() const {
    Require(bandwidth_bps > 0.0, ErrorKind::kInvalidConfig, "bandwidth_bps must be > 0");
    Require(compression_ratio >= 1.0, ErrorKind::kInvalidConfig,
            "compression_ratio must be >= 1");
  }

  NetworkModel Uncompressed() const { return {bandwidth_bps, 1.0}; }
};

inline double TransferDuration(std::uint64_t bytes, const NetworkModel& model) {
  const double bits = static_cast<double>(bytes) * 8.0;
  return (bits / model.compression_ratio) / model.bandwidth_bps;
}

}  // namespace iota::kernel
