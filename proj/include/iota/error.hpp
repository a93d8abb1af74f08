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

#include <stdexcept>
#include <string>
#include <string_view>

namespace iota {

enum class ErrorKind {
  kInvalidConfig,
  kInvalidArgument,
  kShapeError,
  kKeyExists,
  kNotFound,
  kNoActiveMiners,
  kProtocolViolation,
  kTooFewMiners,
  kDegenerateShards,
  kInsufficientHorizon,
};

constexpr std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kShapeError: return "ShapeError";
    case ErrorKind::kKeyExists: return "KeyExists";
    case ErrorKind::kNotFound: return "NotFound";
    case ErrorKind::kNoActiveMiners: return "NoActiveMiners";
    case ErrorKind::kProtocolViolation: return "ProtocolViolation";
    case ErrorKind::kTooFewMiners: return "TooFewMiners";
    case ErrorKind::kDegenerateShards: return "DegenerateShards";
    case ErrorKind::kInsufficientHorizon: return "InsufficientHorizon";
  }
  return "Unknown";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) Fail(kind, message);
}

}  // namespace iota
