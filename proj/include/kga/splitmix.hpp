#pragma once

#include <cstdint>

namespace kga {

/// SplitMix64: tiny, portable, and reproducible across implementations.
/// All benchmark randomness flows through one instance of this generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n); n must be positive.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  bool next_bool(double probability) { return next_double() < probability; }

 private:
  std::uint64_t state_;
};

}  // namespace kga
