#pragma once

// Naive exhaustive oracles over all 2^N subsets. Deliberately independent of the
// extremal search code; only usable for N up to about 20.

#include <cstdint>
#include <vector>

#include "addcomb/counting.hpp"

namespace addcomb::reference {

inline SubsetOfZN fromBits(std::uint64_t bits, std::int64_t n) {
  detail::require(n >= 0 && n <= 30, "exhaustive oracles need N <= 30");
  std::vector<std::int64_t> m;
  for (std::int64_t x = 0; x < n; ++x)
    if (bits >> x & 1) m.push_back(x);
  return SubsetOfZN(n, m);
}

/// min over |A| >= k of Sol(A), over all 2^N subsets.
inline Rational minSol(const LinearFormSystem& s, std::int64_t k, std::int64_t n) {
  Rational best = 2;
  for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
    if (__builtin_popcountll(bits) < k) continue;
    Rational v = solBrute(fromBits(bits, n), s).exact();
    if (v < best) best = v;
  }
  return best;
}

inline Rational maxSol(const LinearFormSystem& s, std::int64_t k, std::int64_t n) {
  Rational best = -1;
  for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
    if (__builtin_popcountll(bits) > k) continue;
    Rational v = solBrute(fromBits(bits, n), s).exact();
    if (v > best) best = v;
  }
  return best;
}

/// Largest strictly free density (Sol = 0 for every system).
inline Rational maxFree(const std::vector<LinearFormSystem>& family, std::int64_t n) {
  std::int64_t best = 0;
  for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
    const int c = __builtin_popcountll(bits);
    if (c <= best) continue;
    auto a = fromBits(bits, n);
    bool free = true;
    for (const auto& s : family) free = free && *solBrute(a, s).count == 0;
    if (free) best = c;
  }
  return Rational(best, n);
}

}  // namespace addcomb::reference
