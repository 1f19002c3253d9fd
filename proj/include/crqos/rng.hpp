#pragma once

#include <cstdint>
#include <random>

namespace crqos {

/// Seedable uniform stream. mt19937_64 output is fixed by the standard and the
/// double conversion below uses only the top 53 bits, so a given seed yields the
/// same sequence on every conforming platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crqos
