#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "addcomb/counting.hpp"
#include "addcomb/error.hpp"
#include "addcomb/forms.hpp"
#include "addcomb/fourier.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/random.hpp"

namespace addcomb {

struct GowersLimits {
  /// Cap on N^(d-2) * N, the number of pointwise operations in the fast path.
  double maxWork = 2e10;
  /// Cap on N^(d+1) for the definitional oracle.
  double maxDefinitionalTerms = 1e8;
};

namespace detail {

/// sum_r |f^(r)|^4, i.e. the fourth power of the U^2 norm.
inline double u2Fourth(const std::vector<std::complex<double>>& f) {
  auto hat = dft(f);
  CompensatedSum acc;
  for (const auto& c : hat) {
    double m = std::norm(c);
    acc.add(m * m);
  }
  return acc.value().real();
}

/// Accumulates ||Delta_{h_1..h_depth} f||_{U^2}^4 over all remaining difference tuples.
inline void accumulateDifferences(const std::vector<std::complex<double>>& f, int depth, CompensatedSum& acc) {
  if (depth == 0) {
    acc.add(u2Fourth(f));
    return;
  }
  const std::size_t n = f.size();
  std::vector<std::complex<double>> diff(n);
  for (std::size_t h = 0; h < n; ++h) {
    for (std::size_t x = 0; x < n; ++x) diff[x] = f[(x + h) % n] * std::conj(f[x]);
    accumulateDifferences(diff, depth - 1, acc);
  }
}

}  // namespace detail

/// ||f||_{U^d}. U^1 is |E f|; U^2 is the l^4 norm of the transform; higher d
/// average the U^2 base case over all difference tuples.
inline double gowersNorm(const CyclicFunction& f, int d, GowersLimits limits = {}) {
  detail::require(d >= 1, "Gowers norm degree must be at least 1");
  if (d == 1) return std::abs(f.mean());
  const double n = static_cast<double>(f.modulus());
  if (std::pow(n, d - 1) > limits.maxWork)
    throw BudgetExceeded("gowersNorm: N^(d-1) = " + std::to_string(std::pow(n, d - 1)) + " exceeds the work cap");
  detail::CompensatedSum acc;
  detail::accumulateDifferences(f.values(), d - 2, acc);
  double power = acc.value().real() / std::pow(n, d - 2);
  return power <= 0 ? 0.0 : std::pow(power, 1.0 / std::ldexp(1.0, d));
}

/// ||f||_{U^d} straight from the defining average over (x, h_1..h_d). Test oracle only.
inline double gowersNormDefinitional(const CyclicFunction& f, int d, GowersLimits limits = {}) {
  detail::require(d >= 1, "Gowers norm degree must be at least 1");
  const std::int64_t n = f.modulus();
  if (std::pow(static_cast<double>(n), d + 1) > limits.maxDefinitionalTerms)
    throw BudgetExceeded("gowersNormDefinitional: N^(d+1) exceeds the oracle cap");
  const auto& v = f.values();
  const std::size_t corners = std::size_t{1} << d;
  std::vector<std::int64_t> h(d, 0), offset(corners);
  detail::CompensatedSum acc;
  for (;;) {
    for (std::size_t eps = 0; eps < corners; ++eps) {
      std::int64_t o = 0;
      for (int j = 0; j < d; ++j)
        if (eps >> j & 1) o += h[j];
      offset[eps] = o % n;
    }
    for (std::int64_t x = 0; x < n; ++x) {
      std::complex<double> p = 1.0;
      for (std::size_t eps = 0; eps < corners; ++eps) {
        auto val = v[(x + offset[eps]) % n];
        p *= (std::popcount(eps) & 1) ? std::conj(val) : val;
      }
      acc.add(p);
    }
    int j = d;
    while (j-- > 0) {
      if (++h[j] < n) break;
      h[j] = 0;
    }
    if (j < 0) break;
  }
  double power = acc.value().real() / std::pow(static_cast<double>(n), d + 1);
  return power <= 0 ? 0.0 : std::pow(power, 1.0 / std::ldexp(1.0, d));
}

struct GvnReport {
  double solF = 0;
  double solG = 0;
  double lhs = 0;  // |Sol(f) - Sol(g)|
  double rhs = 0;  // L * ||f - g||_{U^(s+1)}
  std::int64_t sizeL = 0;
  int degree = 0;
  bool pass = false;
};

/// Evaluates both sides of |Sol(f) - Sol(g)| <= L ||f - g||_{U^(s+1)}.
/// A violated inequality is reported, not thrown.
inline GvnReport gvnCheck(const CyclicFunction& f, const CyclicFunction& g, const LinearFormSystem& s, int degree) {
  detail::require(degree >= 1, "gvnCheck: degree must be positive");
  detail::require(f.modulus() == g.modulus(), "gvnCheck: modulus mismatch");
  detail::require(isPrime(static_cast<std::uint64_t>(f.modulus())), "gvnCheck: N must be prime");
  detail::require(pairwiseIndependent(s), "gvnCheck: system must be pairwise independent");
  auto inUnitInterval = [](const CyclicFunction& h) {
    for (const auto& v : h.values())
      if (v.imag() != 0.0 || v.real() < 0.0 || v.real() > 1.0) return false;
    return true;
  };
  detail::require(inUnitInterval(f) && inUnitInterval(g), "gvnCheck: functions must take values in [0,1]");

  GvnReport r;
  r.degree = degree;
  r.sizeL = size(s);
  r.solF = solBrute(f, s).value.real();
  r.solG = solBrute(g, s).value.real();
  r.lhs = std::abs(r.solF - r.solG);
  std::vector<std::complex<double>> diff(f.modulus());
  for (std::int64_t x = 0; x < f.modulus(); ++x) diff[x] = f.values()[x] - g.values()[x];
  // f - g ranges over [-1, 1], still inside the unit disc.
  r.rhs = static_cast<double>(r.sizeL) * gowersNorm(CyclicFunction(std::move(diff)), degree + 1);
  r.pass = r.lhs <= r.rhs + 1e-12;
  return r;
}

/// Includes each x independently with probability f(x).
inline SubsetOfZN randomRound(const CyclicFunction& f, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::int64_t> members;
  for (std::int64_t x = 0; x < f.modulus(); ++x) {
    const auto v = f.values()[x];
    detail::require(v.imag() == 0.0 && v.real() >= 0.0 && v.real() <= 1.0,
                    "randomRound needs a real function with values in [0,1]");
    if (rng.unit() < v.real()) members.push_back(x);
  }
  return SubsetOfZN(f.modulus(), std::move(members));
}

}  // namespace addcomb
