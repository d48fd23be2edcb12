// SPDX-License-Identifier: Apache-2.0
//
// Counter-based seeding so every trial owns an independent, order-free
// random stream derived from one master seed.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cran {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Named substreams of one master seed.
enum class Stream : std::uint64_t { Evaluation = 0, Calibration = 1, Layout = 2, Geometry = 3 };

inline constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t counter) {
  return splitmix64(splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream) + 1)) + counter);
}

/// mt19937_64 with portable draws: the engine's output sequence is fixed by
/// the standard, and the transforms below avoid library-specific
/// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0,1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }

  /// Uniform integer in [0, n). n > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(static_cast<double>(engine_() >> 11) * 0x1.0p-53 * static_cast<double>(n));
  }

  /// Unit-mean exponential, strictly positive.
  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cran
