#pragma once

#include <cstdint>
#include <random>

namespace addcomb {

/// Seeded generator with a pinned algorithm: std::mt19937_64, whose output
/// sequence is fixed by the C++ standard. Range reduction is done here rather
/// than through <random> distributions, which are implementation-defined, so
/// every value replays bit-for-bit across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Derives an independent child seed; used to give sub-computations their own streams.
  std::uint64_t fork() { return engine_() ^ 0x9E3779B97F4A7C15ULL; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace addcomb
