// Copyright 2026 The dptab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Seeded randomness for every stochastic operation in dptab.
//
// All draws flow through SplitMix64 streams derived from a master seed via
// derive(). The generator and the derivation chain are fully specified here,
// so fixed-seed outputs are identical across platforms and across
// parallel/serial execution schedules. Laplace noise uses the inverse CDF of
// a single uniform draw.

#ifndef DPTAB_RNG_HPP_
#define DPTAB_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>

namespace dptab::rng {

/// Fixed 64-bit finalizer (the SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream derivation: children of a seed are indexed by
/// 64-bit salts. Strings hash through FNV-1a first.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
               mix64(salt + 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  return derive(seed, fnv1a(tag));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                               std::uint64_t index) {
  return derive(derive(seed, tag), index);
}

/// SplitMix64 engine. Satisfies std::uniform_random_bit_generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Uniform draw in [0, 1) with 53 random bits.
template <typename Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling over a power-of-two mask,
/// so the result is exactly uniform and schedule-independent.
template <typename Engine>
std::uint64_t uniform_below(Engine& engine, std::uint64_t n) {
  if (n <= 1) return 0;
  std::uint64_t mask = ~std::uint64_t{0};
  const std::uint64_t range = n - 1;
  mask >>= std::countl_zero(range | 1);
  std::uint64_t value;
  do {
    value = engine() & mask;
  } while (value > range);
  return value;
}

/// Laplace(0, scale) via inverse CDF of one uniform draw:
///   x = -scale * sign(u - 1/2) * ln(1 - 2|u - 1/2|).
template <typename Engine>
double laplace(Engine& engine, double scale) {
  const double u = uniform01(engine) - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0 ? -magnitude : magnitude;
}

/// Index draw from a discrete distribution given by non-negative weights.
/// Weights need not be normalized; the final bucket absorbs rounding slack.
template <typename Engine>
std::size_t categorical(Engine& engine, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform01(engine) * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace dptab::rng

#endif  // DPTAB_RNG_HPP_
