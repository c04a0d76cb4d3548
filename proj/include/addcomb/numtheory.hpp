#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

inline std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::uint64_t mulMod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powMod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulMod(result, base, m);
    base = mulMod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Deterministic Miller-Rabin, exact for every 64-bit input.
inline bool isPrime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulMod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// p_1(n): the smallest prime factor. p_1(1) is reported as 1.
inline std::uint64_t smallestPrimeFactor(std::uint64_t n) {
  if (n <= 1) return n;
  if (n % 2 == 0) return 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return d;
    if (d > 1000000 && isPrime(n)) return n;
  }
  return n;
}

inline std::vector<std::uint64_t> primeFactors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

inline int mobius(std::uint64_t n) {
  int sign = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      sign = -sign;
    }
  }
  if (n > 1) sign = -sign;
  return sign;
}

/// Order of k in (Z/n)^x. Requires gcd(k, n) = 1.
inline std::uint64_t multiplicativeOrder(std::int64_t k, std::uint64_t n) {
  std::uint64_t base = static_cast<std::uint64_t>(mod(k, static_cast<std::int64_t>(n)));
  detail::require(n >= 2 && std::gcd(base, n) == 1, "multiplicativeOrder: k is not a unit");
  std::uint64_t x = base % n;
  std::uint64_t order = 1;
  while (x != 1 % n) {
    x = mulMod(x, base, n);
    ++order;
  }
  return order;
}

inline std::int64_t inverseMod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, b = mod(a, m);
  while (b != 0) {
    std::int64_t q = g / b;
    std::tie(g, b) = std::make_pair(b, g - q * b);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  detail::require(g == 1, "inverseMod: not invertible");
  return mod(x, m);
}

/// Returns (g, u) with g = gcd(|k_1|, ..., |k_r|) >= 0 and k . u = g.
inline std::pair<Integer, std::vector<Integer>> bezout(const std::vector<std::int64_t>& k) {
  Integer g = 0;
  std::vector<Integer> u(k.size(), 0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    // Extended Euclid on (g, k_i): a*g + b*k_i = g'.
    Integer a0 = 1, b0 = 0, a1 = 0, b1 = 1, r0 = g, r1 = k[i];
    while (r1 != 0) {
      Integer q = r0 / r1;
      Integer t = r0 - q * r1;
      r0 = r1;
      r1 = t;
      t = a0 - q * a1;
      a0 = a1;
      a1 = t;
      t = b0 - q * b1;
      b0 = b1;
      b1 = t;
    }
    if (r0 < 0) {
      r0 = -r0;
      a0 = -a0;
      b0 = -b0;
    }
    for (std::size_t j = 0; j < i; ++j) u[j] *= a0;
    u[i] = b0;
    g = r0;
  }
  return {g, u};
}

/// Generalised binomial coefficient C(n, j) for any integer n and j >= 0.
inline Integer binomial(const Integer& n, unsigned j) {
  Integer num = 1, den = 1;
  for (unsigned i = 0; i < j; ++i) {
    num *= (n - i);
    den *= (i + 1);
  }
  return num / den;
}

}  // namespace addcomb
