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

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "iota/error.hpp"
#include "iota/kernel/blob_store.hpp"

namespace iota::kernel {

// Little-endian IEEE-754 codecs. Values are widened back to double on decode.

template <class Float, class Bits>
struct LittleEndianCodec {
  static_assert(sizeof(Float) == sizeof(Bits));
  static constexpr std::size_t kBytesPerValue = sizeof(Float);

  static void Append(Bytes& out, double value) {
    const Bits bits = std::bit_cast<Bits>(static_cast<Float>(value));
    for (std::size_t b = 0; b < sizeof(Bits); ++b) {
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xFFu));
    }
  }

  static Bytes Encode(std::span<const double> values) {
    Bytes out;
    out.reserve(values.size() * kBytesPerValue);
    for (double v : values) Append(out, v);
    return out;
  }

  static double Read(std::span<const std::uint8_t> bytes, std::size_t index) {
    Bits bits = 0;
    const std::size_t base = index * kBytesPerValue;
    for (std::size_t b = 0; b < sizeof(Bits); ++b) {
      bits |= static_cast<Bits>(bytes[base + b]) << (8 * b);
    }
    return static_cast<double>(std::bit_cast<Float>(bits));
  }

  static std::vector<double> Decode(std::span<const std::uint8_t> bytes) {
    Require(bytes.size() % kBytesPerValue == 0, ErrorKind::kShapeError,
            "payload length is not a multiple of the value width");
    std::vector<double> out(bytes.size() / kBytesPerValue);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Read(bytes, i);
    return out;
  }

  // Value rounded through the wire representation.
  static double Quantize(double value) { return static_cast<double>(static_cast<Float>(value)); }
};

using Float32Codec = LittleEndianCodec<float, std::uint32_t>;
using Float64Codec = LittleEndianCodec<double, std::uint64_t>;

}  // namespace iota::kernel
