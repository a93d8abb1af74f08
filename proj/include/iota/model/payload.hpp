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
#include <span>

#include "iota/error.hpp"
#include "iota/kernel/blob_store.hpp"
#include "iota/kernel/codec.hpp"
#include "iota/model/mlp.hpp"

namespace iota::model {

// Weight payload wire layout:
//   u32 layer_index | u32 d_in | u32 d_out | u32 optimizer_len   (little-endian)
//   f32 matrix[d_out * d_in] (row-major) | f32 bias[d_out] | f32 optimizer[optimizer_len]
inline constexpr std::size_t kPayloadHeaderBytes = 16;

namespace detail {
inline void AppendU32(kernel::Bytes& out, std::uint64_t v) {
  Require(v <= 0xFFFFFFFFu, ErrorKind::kShapeError, "header field exceeds 32 bits");
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xFF));
}
inline std::uint32_t ReadU32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}
}  // namespace detail

inline kernel::Bytes EncodeWeightPayload(const LayerWeights& w) {
  kernel::Bytes out;
  out.reserve(kPayloadHeaderBytes + w.ParameterCount() * 4);
  detail::AppendU32(out, w.layer_index);
  detail::AppendU32(out, w.d_in);
  detail::AppendU32(out, w.d_out);
  detail::AppendU32(out, w.optimizer_state.size());
  for (double v : Flatten(w)) kernel::Float32Codec::Append(out, v);
  return out;
}

inline LayerWeights DecodeWeightPayload(std::span<const std::uint8_t> bytes) {
  Require(bytes.size() >= kPayloadHeaderBytes, ErrorKind::kShapeError,
          "weight payload shorter than its header");
  LayerWeights shape;
  shape.layer_index = detail::ReadU32(bytes, 0);
  shape.d_in = detail::ReadU32(bytes, 4);
  shape.d_out = detail::ReadU32(bytes, 8);
  const std::size_t opt_len = detail::ReadU32(bytes, 12);
  shape.matrix.assign(shape.d_in * shape.d_out, 0.0);
  shape.bias.assign(shape.d_out, 0.0);
  shape.optimizer_state.assign(opt_len, 0.0);
  const auto body = bytes.subspan(kPayloadHeaderBytes);
  Require(body.size() == shape.ParameterCount() * 4, ErrorKind::kShapeError,
          "weight payload body length does not match its header");
  return Unflatten(shape, kernel::Float32Codec::Decode(body));
}

}  // namespace iota::model
