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

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iota::kernel {

namespace detail {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a offset basis
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return Mix64(h);
}

}  // namespace detail

// Counter-based splittable stream (SplitMix64 over a derived key).
//
// The i-th draw is a pure function of (key, i), and a child key is a pure
// function of (parent key, label). Forking never touches the parent counter,
// so streams are reproducible regardless of the order in which they are used.
// All distributions are implemented here rather than through <random> so the
// draw sequence does not depend on the standard library vendor.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::string_view stream_id = "root")
      : seed_(seed),
        stream_id_(stream_id),
        key_(detail::Mix64(seed ^ detail::HashLabel(stream_id))) {}

  std::uint64_t seed() const { return seed_; }
  const std::string& stream_id() const { return stream_id_; }
  std::uint64_t draws() const { return counter_; }

  RngStream Fork(std::string_view label) const {
    RngStream child(seed_, stream_id_ + "/" + std::string(label));
    return child;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64() {
    ++counter_;
    return detail::Mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Unbiased integer in [0, n) by rejection on the top of the 64-bit range.
  std::uint64_t UniformIndex(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x = NextU64();
    while (x >= limit) x = NextU64();
    return x % n;
  }

  bool Bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return Uniform01() < p;
  }

  // Marsaglia polar method; the spare variate is cached.
  double Normal(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * Uniform01() - 1.0;
      v = 2.0 * Uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return mean + stddev * u * factor;
  }

  template <class T>
  void Shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(UniformIndex(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::string stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace iota::kernel
