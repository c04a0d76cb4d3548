#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/forms.hpp"
#include "addcomb/fourier.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

/// A subset of Z/N with sorted, distinct members.
class SubsetOfZN {
 public:
  SubsetOfZN() = default;
  SubsetOfZN(std::int64_t modulus, std::vector<std::int64_t> members) : modulus_(modulus), members_(std::move(members)) {
    detail::require(modulus_ >= 1, "subset modulus must be positive");
    std::sort(members_.begin(), members_.end());
    for (std::size_t i = 0; i < members_.size(); ++i) {
      detail::require(members_[i] >= 0 && members_[i] < modulus_,
                      "set member " + std::to_string(members_[i]) + " outside [0, N)");
      detail::require(i == 0 || members_[i] != members_[i - 1],
                      "duplicate set member " + std::to_string(members_[i]));
    }
  }

  static SubsetOfZN full(std::int64_t n) {
    std::vector<std::int64_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return SubsetOfZN(n, std::move(all));
  }

  static SubsetOfZN fromMask(const std::vector<std::uint8_t>& mask) {
    std::vector<std::int64_t> m;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) m.push_back(static_cast<std::int64_t>(i));
    return SubsetOfZN(static_cast<std::int64_t>(mask.size()), std::move(m));
  }

  std::int64_t modulus() const { return modulus_; }
  const std::vector<std::int64_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  Rational density() const { return Rational(static_cast<std::int64_t>(members_.size()), modulus_); }

  bool contains(std::int64_t x) const { return std::binary_search(members_.begin(), members_.end(), x); }

  std::vector<std::uint8_t> mask() const {
    std::vector<std::uint8_t> m(modulus_, 0);
    for (auto x : members_) m[x] = 1;
    return m;
  }

  SubsetOfZN complement() const {
    auto m = mask();
    for (auto& b : m) b = !b;
    return fromMask(m);
  }

  friend bool operator==(const SubsetOfZN&, const SubsetOfZN&) = default;

 private:
  std::int64_t modulus_ = 1;
  std::vector<std::int64_t> members_;
};

/// A function Z/N -> closed complex unit disc.
class CyclicFunction {
 public:
  using value_type = std::complex<double>;

  explicit CyclicFunction(std::vector<value_type> values) : values_(std::move(values)) {
    detail::require(!values_.empty(), "a cyclic function needs N >= 1 values");
    for (const auto& v : values_)
      detail::require(std::isfinite(v.real()) && std::isfinite(v.imag()) && std::abs(v) <= 1.0 + 1e-12,
                      "cyclic function values must lie in the unit disc");
  }

  static CyclicFunction fromReal(const std::vector<double>& values) {
    return CyclicFunction(std::vector<value_type>(values.begin(), values.end()));
  }

  static CyclicFunction constant(std::int64_t n, value_type c) {
    return CyclicFunction(std::vector<value_type>(static_cast<std::size_t>(n), c));
  }

  static CyclicFunction indicator(const SubsetOfZN& a) {
    std::vector<value_type> v(a.modulus(), 0.0);
    for (auto x : a.members()) v[x] = 1.0;
    return CyclicFunction(std::move(v));
  }

  std::int64_t modulus() const { return static_cast<std::int64_t>(values_.size()); }
  const std::vector<value_type>& values() const { return values_; }
  const value_type& operator()(std::int64_t x) const { return values_[mod(x, modulus())]; }

  value_type mean() const {
    value_type s = 0;
    for (const auto& v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  bool isReal() const {
    return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.imag() == 0.0; });
  }

  bool isIndicator() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const auto& v) { return v.imag() == 0.0 && (v.real() == 0.0 || v.real() == 1.0); });
  }

  /// x -> f(x + c).
  CyclicFunction translated(std::int64_t c) const {
    std::vector<value_type> v(values_.size());
    for (std::int64_t x = 0; x < modulus(); ++x) v[x] = (*this)(x + c);
    return CyclicFunction(std::move(v));
  }

 private:
  std::vector<value_type> values_;
};

struct SolValue {
  std::complex<double> value;
  /// Exact configuration count, present when every slot is an indicator.
  std::optional<std::uint64_t> count;
  /// N^D, the number of parameter tuples averaged over.
  std::uint64_t total = 0;

  Rational exact() const {
    detail::require(count.has_value(), "exact value is only available for indicator inputs");
    return Rational(Integer(*count), Integer(total));
  }
};

struct CountingLimits {
  std::uint64_t maxBruteIterations = 1'000'000'000;
  std::uint64_t maxDualTerms = 100'000'000;
};

namespace detail {

/// Neumaier-compensated complex sum.
class CompensatedSum {
 public:
  void add(std::complex<double> x) {
    addPart(re_, reC_, x.real());
    addPart(im_, imC_, x.imag());
  }
  std::complex<double> value() const { return {re_ + reC_, im_ + imC_}; }

 private:
  static void addPart(double& sum, double& comp, double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double re_ = 0, reC_ = 0, im_ = 0, imC_ = 0;
};

inline std::int64_t commonModulus(std::span<const CyclicFunction> fs, const LinearFormSystem& s) {
  require(fs.size() == s.formCount(), "need one function per form (" + std::to_string(s.formCount()) + ")");
  std::int64_t n = fs.front().modulus();
  for (const auto& f : fs) require(f.modulus() == n, "modulus mismatch between functions");
  return n;
}

inline std::uint64_t bruteTotal(const LinearFormSystem& s, std::int64_t n, const CountingLimits& limits) {
  auto total = checkedPower(static_cast<std::uint64_t>(n), s.variableCount(), limits.maxBruteIterations);
  if (!total || *total > limits.maxBruteIterations)
    throw BudgetExceeded("solBrute: N^D exceeds the iteration cap of " + std::to_string(limits.maxBruteIterations));
  return *total;
}

}  // namespace detail

/// Exact configuration count: #{n in (Z/N)^D : psi_i(n) in A_i for every i}.
inline std::uint64_t countConfigurations(const std::vector<const std::vector<std::uint8_t>*>& masks,
                                         const LinearFormSystem& s, CountingLimits limits = {}) {
  const std::int64_t n = static_cast<std::int64_t>(masks.front()->size());
  detail::bruteTotal(s, n, limits);
  std::uint64_t count = 0;
  detail::forEachImage(s, n, [&](const std::vector<std::int64_t>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(*masks[i])[v[i]]) return;
    ++count;
  });
  return count;
}

/// Sol(f_1..f_t) by direct averaging over (Z/N)^D.
inline SolValue solBrute(std::span<const CyclicFunction> fs, const LinearFormSystem& s, CountingLimits limits = {}) {
  const std::int64_t n = detail::commonModulus(fs, s);
  SolValue out;
  out.total = detail::bruteTotal(s, n, limits);
  if (std::all_of(fs.begin(), fs.end(), [](const auto& f) { return f.isIndicator(); })) {
    std::vector<std::vector<std::uint8_t>> masks;
    for (const auto& f : fs) {
      std::vector<std::uint8_t> m(n);
      for (std::int64_t x = 0; x < n; ++x) m[x] = f.values()[x].real() == 1.0;
      masks.push_back(std::move(m));
    }
    std::vector<const std::vector<std::uint8_t>*> ptrs;
    for (const auto& m : masks) ptrs.push_back(&m);
    out.count = countConfigurations(ptrs, s, limits);
    out.value = static_cast<double>(*out.count) / static_cast<double>(out.total);
    return out;
  }
  detail::CompensatedSum acc;
  detail::forEachImage(s, n, [&](const std::vector<std::int64_t>& v) {
    std::complex<double> p = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) p *= fs[i].values()[v[i]];
    acc.add(p);
  });
  out.value = acc.value() / static_cast<double>(out.total);
  return out;
}

inline SolValue solBrute(const CyclicFunction& f, const LinearFormSystem& s, CountingLimits limits = {}) {
  std::vector<CyclicFunction> fs(s.formCount(), f);
  return solBrute(fs, s, limits);
}

inline SolValue solBrute(const SubsetOfZN& a, const LinearFormSystem& s, CountingLimits limits = {}) {
  return solBrute(CyclicFunction::indicator(a), s, limits);
}

/// Sol via the dual sum over u in (Z/N)^k of prod_i f_i^(-(M^T u)_i).
inline std::complex<double> solFast(std::span<const CyclicFunction> fs, const LinearFormSystem& s,
                                    const KernelPresentation& kp, CountingLimits limits = {}) {
  const std::int64_t n = detail::commonModulus(fs, s);
  detail::require(kp.formCount == s.formCount(), "kernel presentation does not match the system");
  detail::require(std::gcd(n, kp.badModulus) == 1,
                  "solFast: N = " + std::to_string(n) + " shares a factor with K = " + std::to_string(kp.badModulus));
  const std::size_t k = kp.rowCount(), t = s.formCount();
  auto terms = detail::checkedPower(static_cast<std::uint64_t>(n), k, limits.maxDualTerms);
  if (!terms || *terms > limits.maxDualTerms)
    throw BudgetExceeded("solFast: N^k exceeds the dual-term cap of " + std::to_string(limits.maxDualTerms));

  std::vector<std::vector<std::complex<double>>> hats;
  for (const auto& f : fs) hats.push_back(dft(f.values()));

  // r_i = -(M^T u)_i mod N, updated as u runs through (Z/N)^k.
  std::vector<std::vector<std::int64_t>> step(k, std::vector<std::int64_t>(t));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < t; ++i) step[j][i] = mod(-kp.matrix[j][i], n);
  std::vector<std::int64_t> u(k, 0), r(t, 0);
  detail::CompensatedSum acc;
  for (;;) {
    std::complex<double> p = 1.0;
    for (std::size_t i = 0; i < t; ++i) p *= hats[i][r[i]];
    acc.add(p);
    std::size_t j = k;
    bool carried = true;
    while (j-- > 0) {
      if (++u[j] < n) {
        for (std::size_t i = 0; i < t; ++i) r[i] = (r[i] + step[j][i]) % n;
        carried = false;
        break;
      }
      u[j] = 0;
      for (std::size_t i = 0; i < t; ++i) r[i] = (r[i] + step[j][i]) % n;  // (N-1) steps back == one step forward
    }
    if (carried) break;
  }
  return acc.value();
}

inline std::complex<double> solFast(const CyclicFunction& f, const LinearFormSystem& s, const KernelPresentation& kp,
                                    CountingLimits limits = {}) {
  std::vector<CyclicFunction> fs(s.formCount(), f);
  return solFast(fs, s, kp, limits);
}

/// (Sol_3AP(A), Sol_3AP(A^c)) as exact rationals; N must be odd.
inline std::pair<Rational, Rational> complementSol(const SubsetOfZN& a) {
  detail::require(a.modulus() % 2 == 1, "complementSol needs odd N");
  const auto ap = systems::threeAP();
  return {solBrute(a, ap).exact(), solBrute(a.complement(), ap).exact()};
}

/// E_x |f(x) - g(x)|.
inline double l1Deviation(const CyclicFunction& f, const CyclicFunction& g) {
  detail::require(f.modulus() == g.modulus(), "l1Deviation: modulus mismatch");
  double s = 0;
  for (std::int64_t x = 0; x < f.modulus(); ++x) s += std::abs(f.values()[x] - g.values()[x]);
  return s / static_cast<double>(f.modulus());
}

// ---- file formats ---------------------------------------------------------

/// Set file: first line "N <modulus>", then one member per line. '#' starts a comment.
inline SubsetOfZN parseSet(std::istream& in) {
  std::string line;
  std::int64_t n = -1;
  std::vector<std::int64_t> members;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (n < 0) {
      detail::require(tok == "N" && (ls >> n) && n >= 1, "set file must start with a line \"N <modulus>\"");
      continue;
    }
    std::size_t used = 0;
    std::int64_t x = 0;
    try {
      x = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    detail::require(used == tok.size(), "bad set member '" + tok + "'");
    members.push_back(x);
  }
  detail::require(n >= 1, "set file is missing the \"N <modulus>\" header");
  return SubsetOfZN(n, std::move(members));
}

inline SubsetOfZN readSetFile(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open set file " + path);
  return parseSet(in);
}

inline void writeSet(std::ostream& out, const SubsetOfZN& a) {
  out << "N " << a.modulus() << "\n";
  for (auto x : a.members()) out << x << "\n";
}

/// Function CSV: rows "index,value" (optionally ",imag") covering 0..N-1; an
/// optional non-numeric header row is skipped.
inline CyclicFunction parseFunctionCsv(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::complex<double>>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    try {
      detail::require(cells.size() == 2 || cells.size() == 3, "function CSV rows need index,value[,imag]");
      std::int64_t idx = std::stoll(cells[0]);
      double re = std::stod(cells[1]);
      double im = cells.size() == 3 ? std::stod(cells[2]) : 0.0;
      rows.emplace_back(idx, std::complex<double>(re, im));
    } catch (const std::invalid_argument&) {
      detail::require(first, "malformed function CSV row: " + line);
    }
    first = false;
  }
  detail::require(!rows.empty(), "function CSV has no rows");
  const std::int64_t n = static_cast<std::int64_t>(rows.size());
  std::vector<std::complex<double>> values(n);
  std::vector<bool> seen(n, false);
  for (const auto& [idx, v] : rows) {
    detail::require(idx >= 0 && idx < n && !seen[idx], "function CSV indices must cover 0..N-1 exactly once");
    seen[idx] = true;
    values[idx] = v;
  }
  return CyclicFunction(std::move(values));
}

inline CyclicFunction readFunctionCsv(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open function file " + path);
  return parseFunctionCsv(in);
}

}  // namespace addcomb
