#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/matrix.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

/// A system of t integer linear forms psi_1..psi_t : Z^D -> Z, stored as rows.
class LinearFormSystem {
 public:
  LinearFormSystem(std::vector<std::vector<std::int64_t>> forms, std::string name = {})
      : forms_(std::move(forms)), name_(std::move(name)) {
    detail::require(!forms_.empty(), "a form system needs at least one form");
    const std::size_t d = forms_.front().size();
    detail::require(d >= 1, "forms need at least one variable");
    for (const auto& f : forms_) {
      detail::require(f.size() == d, "ragged form rows: every form needs the same number of variables");
      detail::require(std::any_of(f.begin(), f.end(), [](auto c) { return c != 0; }),
                      "every form needs a nonzero coefficient");
    }
  }

  std::size_t formCount() const { return forms_.size(); }
  std::size_t variableCount() const { return forms_.front().size(); }
  const std::vector<std::vector<std::int64_t>>& forms() const { return forms_; }
  const std::vector<std::int64_t>& form(std::size_t i) const { return forms_[i]; }
  const std::string& name() const { return name_; }

  /// The system with its form order permuted (used by symmetry checks).
  LinearFormSystem permuted(const std::vector<std::size_t>& order) const {
    std::vector<std::vector<std::int64_t>> rows;
    for (auto i : order) rows.push_back(forms_.at(i));
    return LinearFormSystem(std::move(rows), name_);
  }

  RationalMatrix rationalMatrix() const {
    RationalMatrix m(formCount(), variableCount());
    for (std::size_t i = 0; i < formCount(); ++i)
      for (std::size_t j = 0; j < variableCount(); ++j) m(i, j) = forms_[i][j];
    return m;
  }

  nlohmann::json toJson() const {
    nlohmann::json j;
    if (!name_.empty()) j["name"] = name_;
    j["forms"] = forms_;
    return j;
  }

  static LinearFormSystem fromJson(const nlohmann::json& j) {
    detail::require(j.is_object() && j.contains("forms") && j["forms"].is_array(),
                    "form system JSON needs a \"forms\" array");
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& row : j["forms"]) {
      detail::require(row.is_array(), "each form must be an array of integers");
      std::vector<std::int64_t> r;
      for (const auto& c : row) {
        detail::require(c.is_number_integer(), "form coefficients must be integers");
        r.push_back(c.get<std::int64_t>());
      }
      rows.push_back(std::move(r));
    }
    std::string name = j.value("name", std::string{});
    return LinearFormSystem(std::move(rows), std::move(name));
  }

 private:
  std::vector<std::vector<std::int64_t>> forms_;
  std::string name_;
};

inline LinearFormSystem readSystemFile(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open form-system file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid JSON in " + path + ": " + e.what());
  }
  return LinearFormSystem::fromJson(j);
}

/// A family of systems: either a JSON array of systems or {"systems": [...]}.
inline std::vector<LinearFormSystem> familyFromJson(const nlohmann::json& j) {
  const nlohmann::json* list = &j;
  if (j.is_object()) {
    detail::require(j.contains("systems"), "family JSON needs a \"systems\" array");
    list = &j["systems"];
  }
  detail::require(list->is_array(), "family must be an array of form systems");
  std::vector<LinearFormSystem> out;
  for (const auto& s : *list) out.push_back(LinearFormSystem::fromJson(s));
  return out;
}

namespace systems {

inline LinearFormSystem arithmeticProgression(int length) {
  std::vector<std::vector<std::int64_t>> rows;
  for (int i = 0; i < length; ++i) rows.push_back({1, i});
  return LinearFormSystem(std::move(rows), std::to_string(length) + "AP");
}

inline LinearFormSystem threeAP() { return arithmeticProgression(3); }
inline LinearFormSystem fourAP() { return arithmeticProgression(4); }

/// (n1, k n1): two dependent forms.
inline LinearFormSystem dependentPair(std::int64_t k) {
  return LinearFormSystem({{1}, {k}}, "dependent k=" + std::to_string(k));
}

/// Parametrises {x + y - 3z = 0}: x = 3n1 - n2, y = n2, z = n1.
inline LinearFormSystem xPlusYMinus3Z() {
  return LinearFormSystem({{3, -1}, {0, 1}, {1, 0}}, "x+y-3z");
}

}  // namespace systems

/// Size L = max(D, t, max |coefficient|).
inline std::int64_t size(const LinearFormSystem& s) {
  std::int64_t l = static_cast<std::int64_t>(std::max(s.formCount(), s.variableCount()));
  for (const auto& f : s.forms())
    for (auto c : f) l = std::max<std::int64_t>(l, c < 0 ? -c : c);
  return l;
}

inline bool pairwiseIndependent(const LinearFormSystem& s) {
  for (std::size_t i = 0; i < s.formCount(); ++i)
    for (std::size_t j = i + 1; j < s.formCount(); ++j) {
      RationalMatrix m(2, s.variableCount());
      for (std::size_t c = 0; c < s.variableCount(); ++c) {
        m(0, c) = s.form(i)[c];
        m(1, c) = s.form(j)[c];
      }
      if (rank(m) < 2) return false;
    }
  return true;
}

/// True iff the all-ones vector lies in the rational image of the forms.
inline bool isInvariant(const LinearFormSystem& s) {
  std::vector<Rational> ones(s.formCount(), Rational(1));
  return solve(s.rationalMatrix(), ones).has_value();
}

/// Uniformity degree used by default: t - 2, clamped below at 1.
inline int defaultDegree(const LinearFormSystem& s) {
  detail::require(pairwiseIndependent(s), "defaultDegree needs a pairwise independent system");
  return std::max<int>(1, static_cast<int>(s.formCount()) - 2);
}

/// Integer matrix whose kernel mod N equals the image of the forms mod N,
/// for every N coprime to badModulus.
struct KernelPresentation {
  std::vector<std::vector<std::int64_t>> matrix;  // k rows of length t
  std::int64_t badModulus = 1;
  std::vector<std::int64_t> invariantFactors;     // every nonzero SNF entry
  std::size_t formCount = 0;

  std::size_t rowCount() const { return matrix.size(); }

  bool annihilates(const std::vector<std::int64_t>& y, std::int64_t n) const {
    for (const auto& row : matrix) {
      std::int64_t acc = 0;
      for (std::size_t i = 0; i < row.size(); ++i) acc = mod(acc + mod(row[i], n) * mod(y[i], n), n);
      if (acc != 0) return false;
    }
    return true;
  }

  nlohmann::json toJson() const {
    return {{"matrix", matrix}, {"badModulus", badModulus}, {"invariantFactors", invariantFactors},
            {"rows", matrix.size()}};
  }
};

inline KernelPresentation kernelize(const LinearFormSystem& s) {
  IntegerMatrix m(s.formCount(), s.variableCount());
  for (std::size_t i = 0; i < s.formCount(); ++i)
    for (std::size_t j = 0; j < s.variableCount(); ++j) m(i, j) = s.form(i)[j];
  SmithForm snf = smithNormalForm(m);

  KernelPresentation kp;
  kp.formCount = s.formCount();
  Integer bad = 1;
  for (const auto& d : snf.invariantFactors) {
    kp.invariantFactors.push_back(d.convert_to<std::int64_t>());
    bad *= d;
  }
  detail::require(bad <= Integer(INT64_MAX), "kernelize: bad modulus overflows 64 bits");
  kp.badModulus = bad.convert_to<std::int64_t>();
  // Rows of U beyond the rank vanish on the image and present the free cokernel.
  for (std::size_t i = snf.rank; i < s.formCount(); ++i) {
    std::vector<std::int64_t> row;
    for (std::size_t j = 0; j < s.formCount(); ++j) {
      detail::require(abs(snf.left(i, j)) <= Integer(INT64_MAX / 4), "kernelize: entry overflow");
      row.push_back(snf.left(i, j).convert_to<std::int64_t>());
    }
    kp.matrix.push_back(std::move(row));
  }
  return kp;
}

struct EnumerationLimits {
  std::uint64_t maxPoints = 1'000'000;
};

namespace detail {

/// N^D, or nullopt on overflow past the cap.
inline std::optional<std::uint64_t> checkedPower(std::uint64_t n, std::size_t d, std::uint64_t cap) {
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (n != 0 && p > cap / n) return std::nullopt;
    p *= n;
  }
  return p;
}

/// Calls visit(values) with psi(n) mod N for every n in (Z/N)^D, odometer order.
template <class Visit>
void forEachImage(const LinearFormSystem& s, std::int64_t n, Visit&& visit) {
  const std::size_t t = s.formCount(), d = s.variableCount();
  std::vector<std::vector<std::int64_t>> coef(d, std::vector<std::int64_t>(t));
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < d; ++j) coef[j][i] = mod(s.form(i)[j], n);
  std::vector<std::int64_t> point(d, 0), vals(t, 0);
  for (;;) {
    visit(static_cast<const std::vector<std::int64_t>&>(vals));
    std::size_t j = d;
    while (j-- > 0) {
      if (++point[j] < n) {
        for (std::size_t i = 0; i < t; ++i) {
          vals[i] += coef[j][i];
          if (vals[i] >= n) vals[i] -= n;
        }
        break;
      }
      point[j] = 0;
      for (std::size_t i = 0; i < t; ++i) vals[i] = mod(vals[i] - coef[j][i] * (n - 1), n);
      if (j == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace detail

/// Exact enumeration of the image psi((Z/N)^D), sorted and deduplicated.
inline std::vector<std::vector<std::int64_t>> imageModN(const LinearFormSystem& s, std::int64_t n,
                                                        EnumerationLimits limits = {}) {
  detail::require(n >= 1, "modulus must be positive");
  auto total = detail::checkedPower(static_cast<std::uint64_t>(n), s.variableCount(), limits.maxPoints);
  if (!total || *total > limits.maxPoints)
    throw BudgetExceeded("imageModN: N^D exceeds the enumeration cap of " + std::to_string(limits.maxPoints));
  std::vector<std::vector<std::int64_t>> points;
  points.reserve(*total);
  detail::forEachImage(s, n, [&](const std::vector<std::int64_t>& v) { points.push_back(v); });
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace addcomb
