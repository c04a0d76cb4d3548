#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/matrix.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/random.hpp"
#include "addcomb/rational.hpp"

namespace addcomb {

// ---- unitriangular groups ----------------------------------------------------

inline bool isStrictlyUpper(const RationalMatrix& x) {
  if (x.rows() != x.cols()) return false;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (x(i, j) != 0) return false;
  return true;
}

inline RationalMatrix bracket(const RationalMatrix& x, const RationalMatrix& y) { return x * y - y * x; }

/// Upper unitriangular matrix with exact rational entries.
class UnitriangularElement {
 public:
  UnitriangularElement() = default;
  explicit UnitriangularElement(RationalMatrix m) : m_(std::move(m)) {
    detail::require(m_.rows() == m_.cols() && m_.rows() >= 1, "unitriangular element must be square");
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      detail::require(m_(i, i) == 1, "unitriangular element needs a unit diagonal");
      for (std::size_t j = 0; j < i; ++j) detail::require(m_(i, j) == 0, "unitriangular element must be upper triangular");
    }
  }

  static UnitriangularElement identity(std::size_t kappa) {
    UnitriangularElement e;
    e.m_ = RationalMatrix::identity(kappa);
    return e;
  }

  std::size_t kappa() const { return m_.rows(); }
  const RationalMatrix& matrix() const { return m_; }
  bool isIdentity() const { return m_ == RationalMatrix::identity(kappa()); }

  friend UnitriangularElement operator*(const UnitriangularElement& a, const UnitriangularElement& b) {
    UnitriangularElement e;
    e.m_ = a.m_ * b.m_;
    return e;
  }

  friend bool operator==(const UnitriangularElement& a, const UnitriangularElement& b) { return a.m_ == b.m_; }

  UnitriangularElement inverse() const {
    // (I + N)^-1 = I - N + N^2 - ...
    const std::size_t k = kappa();
    RationalMatrix n = m_ - RationalMatrix::identity(k);
    RationalMatrix term = RationalMatrix::identity(k), sum = RationalMatrix::identity(k);
    for (std::size_t p = 1; p < k; ++p) {
      term = Rational(-1) * (term * n);
      sum = sum + term;
    }
    UnitriangularElement e;
    e.m_ = std::move(sum);
    return e;
  }

 private:
  RationalMatrix m_;
};

/// Terminating logarithm series.
inline RationalMatrix logOf(const UnitriangularElement& g) {
  const std::size_t k = g.kappa();
  RationalMatrix n = g.matrix() - RationalMatrix::identity(k);
  RationalMatrix power = n, sum(k, k);
  for (std::size_t p = 1; p < k; ++p) {
    Rational c(p % 2 == 1 ? 1 : -1, static_cast<std::int64_t>(p));
    sum = sum + c * power;
    power = power * n;
  }
  return sum;
}

/// Terminating exponential series; x must be strictly upper triangular.
inline UnitriangularElement expOf(const RationalMatrix& x) {
  detail::require(isStrictlyUpper(x), "exp needs a strictly upper triangular matrix");
  const std::size_t k = x.rows();
  RationalMatrix term = RationalMatrix::identity(k), sum = RationalMatrix::identity(k);
  for (std::size_t p = 1; p < k; ++p) {
    term = Rational(1, static_cast<std::int64_t>(p)) * (term * x);
    sum = sum + term;
  }
  return UnitriangularElement(std::move(sum));
}

/// g^r = exp(r log g), defined for every rational r.
inline UnitriangularElement power(const UnitriangularElement& g, const Rational& r) {
  if (r == 0) return UnitriangularElement::identity(g.kappa());
  if (r == 1) return g;
  return expOf(r * logOf(g));
}

inline UnitriangularElement commutator(const UnitriangularElement& a, const UnitriangularElement& b) {
  return a * b * a.inverse() * b.inverse();
}

// ---- filtered nilmanifold models -----------------------------------------------

/// (G/Gamma, G_., X) realised inside the upper unitriangular kappa x kappa group.
/// levelDims holds m_0, m_1, ..., m_s; G_i is exp(span(X_{m-m_i+1}, ..., X_m)).
class FilteredNilmanifoldModel {
 public:
  FilteredNilmanifoldModel(std::string name, std::size_t kappa, std::vector<RationalMatrix> basis,
                           std::vector<std::size_t> levelDims, bool prefiltration = false)
      : name_(std::move(name)),
        kappa_(kappa),
        basis_(std::move(basis)),
        levelDims_(std::move(levelDims)),
        prefiltration_(prefiltration) {
    validate();
    buildCoordinateSolver();
    checkIdeals();
    checkFiltration();
    buildLevelData();
  }

  const std::string& name() const { return name_; }
  std::size_t kappa() const { return kappa_; }
  std::size_t dim() const { return basis_.size(); }
  int degree() const { return static_cast<int>(levelDims_.size()) - 1; }
  bool prefiltration() const { return prefiltration_; }
  const std::vector<RationalMatrix>& basis() const { return basis_; }
  const std::vector<std::size_t>& levelDims() const { return levelDims_; }

  /// m_i, with m_i = 0 beyond the degree.
  std::size_t levelDim(int i) const {
    return i < 0 ? dim() : static_cast<std::size_t>(i) < levelDims_.size() ? levelDims_[i] : 0;
  }
  /// First coordinate index (0-based) belonging to G_i.
  std::size_t levelStart(int i) const { return dim() - levelDim(i); }
  /// r_i = m_i - m_{i+1}.
  std::size_t levelRank(int i) const { return levelDim(i) - levelDim(i + 1); }

  /// Coefficients of a Lie algebra element in the basis X; throws when outside span(X).
  std::vector<Rational> algebraCoords(const RationalMatrix& z) const {
    detail::require(z.rows() == kappa_ && z.cols() == kappa_, "matrix has the wrong dimension for this model");
    std::vector<Rational> c(dim(), 0);
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b) c[a] += pivotInverse_(a, b) * z.data()[pivotPositions_[b]];
    RationalMatrix back(kappa_, kappa_);
    for (std::size_t j = 0; j < dim(); ++j)
      if (c[j] != 0) back = back + c[j] * basis_[j];
    detail::require(back == z, "element lies outside the modeled group");
    return c;
  }

  RationalMatrix algebraElement(const std::vector<Rational>& c) const {
    RationalMatrix z(kappa_, kappa_);
    for (std::size_t j = 0; j < dim(); ++j)
      if (c[j] != 0) z = z + c[j] * basis_[j];
    return z;
  }

  /// psi^-1: exp(t_1 X_1) ... exp(t_m X_m).
  UnitriangularElement element(const std::vector<Rational>& t) const {
    detail::require(t.size() == dim(), "coordinate vector has the wrong length");
    UnitriangularElement g = UnitriangularElement::identity(kappa_);
    for (std::size_t j = 0; j < dim(); ++j)
      if (t[j] != 0) g = g * expOf(t[j] * basis_[j]);
    return g;
  }

  /// Mal'cev coordinates of the second kind, by peeling one basis direction at a time.
  std::vector<Rational> malcev(const UnitriangularElement& g) const {
    detail::require(g.kappa() == kappa_, "element has the wrong dimension for this model");
    std::vector<Rational> t(dim(), 0);
    UnitriangularElement residual = g;
    for (std::size_t j = 0; j < dim(); ++j) {
      auto c = algebraCoords(logOf(residual));
      for (std::size_t a = 0; a < j; ++a) detail::ensure(c[a] == 0, "malcev: peeling left a lower coordinate");
      t[j] = c[j];
      if (t[j] != 0) residual = expOf(Rational(-t[j]) * basis_[j]) * residual;
    }
    detail::ensure(residual.isIdentity(), "malcev: residual did not reduce to the identity");
    return t;
  }

  /// psi_i(g): the level-i block of coordinates.
  std::vector<Rational> levelCoords(const UnitriangularElement& g, int i) const {
    auto t = malcev(g);
    return std::vector<Rational>(t.begin() + levelStart(i), t.begin() + levelStart(i + 1));
  }

  bool inLevel(const UnitriangularElement& g, int i) const {
    auto t = malcev(g);
    for (std::size_t j = 0; j < levelStart(i); ++j)
      if (t[j] != 0) return false;
    return true;
  }

  bool inGamma(const UnitriangularElement& g) const {
    auto t = malcev(g);
    return std::all_of(t.begin(), t.end(), [](const Rational& x) { return isIntegral(x); });
  }

  /// Membership in Gamma * G_i: the coordinates before level i are integers.
  bool inGammaTimesLevel(const UnitriangularElement& g, int i) const {
    auto t = malcev(g);
    for (std::size_t j = 0; j < levelStart(i); ++j)
      if (!isIntegral(t[j])) return false;
    return true;
  }

  /// Rational span (in algebra coordinates) of the Lie ideal generated by
  /// g_{i+1} and the brackets [g_j, g_{i-j}].
  const RationalSpan& triangledown(int i) const { return levelData_.at(i).ideal; }

  /// Basis of the level-i projection V_i of that ideal.
  const std::vector<std::vector<Rational>>& levelConstraints(int i) const { return levelData_.at(i).constraints; }

  /// Integer basis of Z^{r_i} intersected with the orthogonal complement of V_i.
  const std::vector<std::vector<std::int64_t>>& dualLattice(int i) const { return levelData_.at(i).dual; }

  bool inTriangledown(const UnitriangularElement& g, int i) const {
    return triangledown(i).contains(algebraCoords(logOf(g)));
  }

  nlohmann::json toJson() const {
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& x : basis_) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < kappa_; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < kappa_; ++j) row.push_back(toString(x(i, j)));
        rows.push_back(row);
      }
      basis.push_back(rows);
    }
    return {{"name", name_},      {"dimension", kappa_},         {"basis", basis},
            {"levelDims", levelDims_}, {"degree", degree()}, {"prefiltration", prefiltration_}};
  }

  static FilteredNilmanifoldModel fromJson(const nlohmann::json& j) {
    detail::require(j.is_object(), "model JSON must be an object");
    for (const char* key : {"dimension", "basis", "levelDims"})
      detail::require(j.contains(key), std::string("model JSON is missing \"") + key + "\"");
    auto kappa = j["dimension"].get<std::size_t>();
    std::vector<RationalMatrix> basis;
    for (const auto& xs : j["basis"]) {
      detail::require(xs.is_array() && xs.size() == kappa, "basis matrices must be dimension x dimension");
      RationalMatrix x(kappa, kappa);
      for (std::size_t r = 0; r < kappa; ++r) {
        detail::require(xs[r].is_array() && xs[r].size() == kappa, "basis matrices must be dimension x dimension");
        for (std::size_t c = 0; c < kappa; ++c) {
          const auto& e = xs[r][c];
          x(r, c) = e.is_string() ? parseRational(e.get<std::string>()) : Rational(e.get<std::int64_t>());
        }
      }
      basis.push_back(std::move(x));
    }
    auto dims = j["levelDims"].get<std::vector<std::size_t>>();
    if (j.contains("degree"))
      detail::require(j["degree"].get<int>() + 1 == static_cast<int>(dims.size()),
                      "model degree must equal len(levelDims) - 1");
    return FilteredNilmanifoldModel(j.value("name", std::string("custom")), kappa, std::move(basis), std::move(dims),
                                    j.value("prefiltration", false));
  }

 private:
  struct LevelData {
    RationalSpan ideal{0};
    std::vector<std::vector<Rational>> constraints;
    std::vector<std::vector<std::int64_t>> dual;
  };

  void validate() const {
    detail::require(kappa_ >= 1, "model dimension must be positive");
    detail::require(!basis_.empty(), "model needs at least one basis element");
    for (const auto& x : basis_)
      detail::require(x.rows() == kappa_ && x.cols() == kappa_ && isStrictlyUpper(x),
                      "basis elements must be strictly upper triangular dimension x dimension matrices");
    detail::require(levelDims_.size() >= 2, "levelDims needs m_0 and at least m_1");
    const std::size_t m = dim();
    if (prefiltration_)
      detail::require(levelDims_[0] <= m, "m_0 cannot exceed dim G");
    else
      detail::require(levelDims_[0] == m && levelDims_[1] == m, "a filtration needs m_0 = m_1 = dim G");
    for (std::size_t i = 1; i < levelDims_.size(); ++i)
      detail::require(levelDims_[i] <= levelDims_[i - 1], "levelDims must be non-increasing");
    detail::require(levelDims_.back() > 0, "the top level m_s must be positive");
  }

  void buildCoordinateSolver() {
    const std::size_t m = dim(), kk = kappa_ * kappa_;
    // Columns are the flattened basis matrices; pick m independent positions.
    RationalMatrix cols(m, kk);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t p = 0; p < kk; ++p) cols(j, p) = basis_[j].data()[p];
    auto echelon = rowReduce(cols);
    detail::require(echelon.pivots.size() == m, "basis matrices are linearly dependent");
    pivotPositions_ = echelon.pivots;
    RationalMatrix sub(m, 2 * m);
    for (std::size_t b = 0; b < m; ++b) {
      for (std::size_t j = 0; j < m; ++j) sub(b, j) = basis_[j].data()[pivotPositions_[b]];
      sub(b, m + b) = 1;
    }
    auto inv = rowReduce(sub);
    pivotInverse_ = RationalMatrix(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) pivotInverse_(a, b) = inv.reduced(a, m + b);
  }

  bool inTail(const RationalMatrix& z, std::size_t start) const {
    auto c = algebraCoords(z);
    for (std::size_t a = 0; a < start && a < c.size(); ++a)
      if (c[a] != 0) return false;
    return true;
  }

  void checkIdeals() const {
    for (std::size_t a = 0; a < dim(); ++a)
      for (std::size_t b = 0; b < dim(); ++b)
        detail::require(inTail(bracket(basis_[a], basis_[b]), std::max(a, b)),
                        "span(X_j..X_m) is not an ideal for j = " + std::to_string(std::max(a, b) + 1));
  }

  void checkFiltration() const {
    const int s = degree();
    for (int i = 0; i <= s; ++i)
      for (int j = i; j <= s; ++j) {
        const std::size_t target = levelStart(i + j);
        for (std::size_t a = levelStart(i); a < dim(); ++a)
          for (std::size_t b = levelStart(j); b < dim(); ++b) {
            auto z = bracket(basis_[a], basis_[b]);
            bool ok = (i + j > s) ? z.isZero() : inTail(z, target);
            detail::require(ok, "[G_" + std::to_string(i) + ", G_" + std::to_string(j) + "] is not inside G_" +
                                    std::to_string(i + j));
          }
      }
  }

  void buildLevelData() {
    const int s = degree();
    const std::size_t m = dim();
    levelData_.resize(s + 1);
    for (int i = 1; i <= s; ++i) {
      RationalSpan ideal(m);
      for (std::size_t a = levelStart(i + 1); a < m; ++a) {
        std::vector<Rational> e(m, 0);
        e[a] = 1;
        ideal.add(e);
      }
      for (int j = 0; j <= i; ++j)
        for (std::size_t a = levelStart(j); a < m; ++a)
          for (std::size_t b = levelStart(i - j); b < m; ++b) ideal.add(algebraCoords(bracket(basis_[a], basis_[b])));
      // Close under brackets with the whole algebra.
      for (bool grew = true; grew;) {
        grew = false;
        for (const auto& v : ideal.basis()) {
          auto z = algebraElement(v);
          for (const auto& x : basis_) grew |= ideal.add(algebraCoords(bracket(x, z)));
        }
      }
      const std::size_t lo = levelStart(i), hi = levelStart(i + 1), r = hi - lo;
      RationalSpan projected(r);
      for (const auto& v : ideal.basis()) projected.add(std::vector<Rational>(v.begin() + lo, v.begin() + hi));
      levelData_[i].ideal = std::move(ideal);
      levelData_[i].constraints = projected.basis();
      levelData_[i].dual = saturatedDual(levelData_[i].constraints, r);
    }
  }

  static std::vector<std::vector<std::int64_t>> saturatedDual(const std::vector<std::vector<Rational>>& v,
                                                               std::size_t r) {
    if (r == 0) return {};
    RationalMatrix vm(v.size(), r);
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = 0; b < r; ++b) vm(a, b) = v[a][b];
    auto null = v.empty() ? std::vector<std::vector<Rational>>{} : nullspace(vm);
    if (v.empty())
      for (std::size_t a = 0; a < r; ++a) {
        std::vector<Rational> e(r, 0);
        e[a] = 1;
        null.push_back(e);
      }
    if (null.empty()) return {};
    IntegerMatrix w(null.size(), r);
    for (std::size_t a = 0; a < null.size(); ++a) {
      Integer l = 1;
      for (const auto& x : null[a]) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
      for (std::size_t b = 0; b < r; ++b) w(a, b) = boost::multiprecision::numerator(null[a][b] * Rational(l));
    }
    // U W V = D, so the rational row space of W meets Z^r in the span of the first rank rows of V^-1.
    auto snf = smithNormalForm(w);
    RationalMatrix aug(r, 2 * r);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) aug(a, b) = Rational(snf.right(a, b));
      aug(a, r + a) = 1;
    }
    auto inv = rowReduce(aug);
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t a = 0; a < snf.rank; ++a) {
      std::vector<std::int64_t> row;
      for (std::size_t b = 0; b < r; ++b) {
        const Rational& x = inv.reduced(a, r + b);
        detail::ensure(isIntegral(x), "dual lattice: unimodular inverse is not integral");
        row.push_back(boost::multiprecision::numerator(x).convert_to<std::int64_t>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  std::string name_;
  std::size_t kappa_;
  std::vector<RationalMatrix> basis_;
  std::vector<std::size_t> levelDims_;
  bool prefiltration_;
  std::vector<std::size_t> pivotPositions_;
  RationalMatrix pivotInverse_;
  std::vector<LevelData> levelData_;
};

using ModelPtr = std::shared_ptr<const FilteredNilmanifoldModel>;

namespace models {

inline RationalMatrix elementary(std::size_t kappa, std::size_t i, std::size_t j) {
  RationalMatrix x(kappa, kappa);
  x(i, j) = 1;
  return x;
}

/// H_3 with X1 = e12, X2 = e23, X3 = e13 and the lower central series (degree 2).
inline ModelPtr heisenbergLcs() {
  return std::make_shared<FilteredNilmanifoldModel>(
      "heisenberg-lcs", 3, std::vector<RationalMatrix>{elementary(3, 0, 1), elementary(3, 1, 2), elementary(3, 0, 2)},
      std::vector<std::size_t>{3, 3, 1});
}

/// H_3 of degree 3 with G_2 = G_3 = centre.
inline ModelPtr heisenbergDeg3() {
  return std::make_shared<FilteredNilmanifoldModel>(
      "heisenberg-deg3", 3, std::vector<RationalMatrix>{elementary(3, 0, 1), elementary(3, 1, 2), elementary(3, 0, 2)},
      std::vector<std::size_t>{3, 3, 1, 1});
}

/// R^m / Z^m of degree s with the coordinate filtration m_i = max(m - i + 1, 1).
inline ModelPtr torus(std::size_t m, int s) {
  detail::require(m >= 1 && s >= 1, "torus needs m >= 1 and s >= 1");
  std::vector<RationalMatrix> basis;
  for (std::size_t j = 0; j < m; ++j) basis.push_back(elementary(m + 1, 0, j + 1));
  std::vector<std::size_t> dims{m};
  for (int i = 1; i <= s; ++i) dims.push_back(std::max<std::int64_t>(static_cast<std::int64_t>(m) - i + 1, 1));
  return std::make_shared<FilteredNilmanifoldModel>("torus:m=" + std::to_string(m) + ",s=" + std::to_string(s), m + 1,
                                                    std::move(basis), std::move(dims));
}

/// Resolves "heisenberg-lcs", "heisenberg-deg3", "torus:m=M,s=S", or a path to a model JSON file.
inline ModelPtr byName(const std::string& name) {
  if (name == "heisenberg-lcs") return heisenbergLcs();
  if (name == "heisenberg-deg3") return heisenbergDeg3();
  if (name.rfind("torus:", 0) == 0) {
    std::int64_t m = -1, s = -1;
    std::string rest = name.substr(6);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto comma = rest.find(',', pos);
      auto item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      auto eq = item.find('=');
      detail::require(eq != std::string::npos, "torus model needs the form torus:m=M,s=S");
      auto key = item.substr(0, eq);
      std::int64_t value = 0;
      try {
        value = std::stoll(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw InputError("bad torus parameter '" + item + "'");
      }
      if (key == "m")
        m = value;
      else if (key == "s")
        s = value;
      else
        throw InputError("unknown torus parameter '" + key + "'");
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    detail::require(m >= 1 && s >= 1, "torus model needs m >= 1 and s >= 1");
    return torus(static_cast<std::size_t>(m), static_cast<int>(s));
  }
  std::ifstream in(name);
  detail::require(in.good(), "unknown model '" + name + "' (expected heisenberg-lcs, heisenberg-deg3, torus:m=M,s=S "
                                                        "or a model JSON file)");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid model JSON in " + name + ": " + e.what());
  }
  return std::make_shared<FilteredNilmanifoldModel>(FilteredNilmanifoldModel::fromJson(j));
}

}  // namespace models

/// {g} and [g] with g = {g}[g], psi({g}) in [0,1)^m and [g] in Gamma.
inline std::pair<UnitriangularElement, UnitriangularElement> fracIntParts(const FilteredNilmanifoldModel& model,
                                                                          const UnitriangularElement& g) {
  UnitriangularElement frac = g;
  for (std::size_t j = 0; j < model.dim(); ++j) {
    Integer f = floorOf(model.malcev(frac)[j]);
    if (f != 0) frac = frac * expOf(Rational(-f) * model.basis()[j]);
  }
  UnitriangularElement integral = frac.inverse() * g;
  return {frac, integral};
}

// ---- polynomial sequences ---------------------------------------------------------

/// g(n) = g_0 g_1^n g_2^C(n,2) ... g_s^C(n,s) with g_j in G_{j + levelOffset}.
class PolynomialSequence {
 public:
  PolynomialSequence(ModelPtr model, std::vector<UnitriangularElement> coefficients, int levelOffset = 0)
      : model_(std::move(model)), coefficients_(std::move(coefficients)), levelOffset_(levelOffset) {
    detail::require(model_ != nullptr, "polynomial sequence needs a model");
    detail::require(levelOffset_ >= 0, "level offset must be non-negative");
    const std::size_t len = static_cast<std::size_t>(model_->degree()) + 1;
    detail::require(!coefficients_.empty() && coefficients_.size() <= len,
                    "a polynomial sequence has between 1 and s+1 coefficients");
    while (coefficients_.size() < len) coefficients_.push_back(UnitriangularElement::identity(model_->kappa()));
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
      detail::require(coefficients_[j].kappa() == model_->kappa(), "coefficient has the wrong dimension");
      const int level = static_cast<int>(j) + levelOffset_;
      detail::require(model_->inLevel(coefficients_[j], level),
                      "Taylor coefficient " + std::to_string(j) + " does not lie in G_" + std::to_string(level));
      logs_.push_back(logOf(coefficients_[j]));
    }
  }

  static PolynomialSequence identity(ModelPtr model) {
    auto id = UnitriangularElement::identity(model->kappa());
    return PolynomialSequence(std::move(model), {id});
  }

  const FilteredNilmanifoldModel& model() const { return *model_; }
  const ModelPtr& modelPtr() const { return model_; }
  const std::vector<UnitriangularElement>& coefficients() const { return coefficients_; }
  const UnitriangularElement& coefficient(std::size_t j) const { return coefficients_.at(j); }
  int levelOffset() const { return levelOffset_; }
  int degree() const { return model_->degree(); }

  UnitriangularElement operator()(const Integer& n) const {
    UnitriangularElement g = coefficients_[0];
    for (std::size_t j = 1; j < coefficients_.size(); ++j) {
      if (logs_[j].isZero()) continue;
      Integer e = binomial(n, static_cast<unsigned>(j));
      if (e != 0) g = g * expOf(Rational(e) * logs_[j]);
    }
    return g;
  }

  nlohmann::json toJson() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
      nlohmann::json c = nlohmann::json::array();
      for (const auto& x : model_->malcev(coefficients_[j])) c.push_back(toString(x));
      coeffs.push_back({{"index", j}, {"malcev", c}});
    }
    return {{"model", model_->name()}, {"degree", degree()}, {"levelOffset", levelOffset_}, {"taylor", coeffs}};
  }

 private:
  ModelPtr model_;
  std::vector<UnitriangularElement> coefficients_;
  std::vector<RationalMatrix> logs_;
  int levelOffset_;
};

inline UnitriangularElement taylorEval(const PolynomialSequence& p, const Integer& n) { return p(n); }

/// Taylor coefficients from the values g(0), ..., g(L):
/// g_0 = g(0), g_j = (g_0 g_1^j ... g_{j-1}^C(j,j-1))^-1 g(j).
/// Throws when some g_j is outside G_{j + levelOffset}.
inline PolynomialSequence taylorExpand(ModelPtr model, const std::vector<UnitriangularElement>& values,
                                       int levelOffset = 0) {
  detail::require(!values.empty(), "taylorExpand needs at least one value");
  std::vector<UnitriangularElement> coeffs;
  std::vector<RationalMatrix> logs;
  for (std::size_t j = 0; j < values.size(); ++j) {
    UnitriangularElement partial = UnitriangularElement::identity(model->kappa());
    for (std::size_t a = 0; a < coeffs.size(); ++a) {
      Integer e = binomial(Integer(j), static_cast<unsigned>(a));
      if (e != 0 && !logs[a].isZero()) partial = partial * expOf(Rational(e) * logs[a]);
    }
    coeffs.push_back(partial.inverse() * values[j]);
    logs.push_back(logOf(coeffs.back()));
  }
  const std::size_t len = static_cast<std::size_t>(model->degree()) + 1;
  for (std::size_t j = len; j < coeffs.size(); ++j)
    detail::require(coeffs[j].isIdentity(), "values are not a polynomial of degree at most s for this filtration");
  coeffs.resize(std::min(coeffs.size(), len), UnitriangularElement::identity(model->kappa()));
  return PolynomialSequence(std::move(model), std::move(coeffs), levelOffset);
}

inline std::vector<UnitriangularElement> sampleValues(const PolynomialSequence& p, std::int64_t count,
                                                      std::int64_t start = 0) {
  std::vector<UnitriangularElement> v;
  for (std::int64_t n = start; n < start + count; ++n) v.push_back(p(Integer(n)));
  return v;
}

/// Pointwise product, re-expanded (and so re-checked against the filtration).
inline PolynomialSequence pointwiseProduct(const PolynomialSequence& a, const PolynomialSequence& b) {
  detail::require(&a.model() == &b.model() || a.model().name() == b.model().name(), "product needs a common model");
  std::vector<UnitriangularElement> v;
  for (int n = 0; n <= a.degree(); ++n) v.push_back(a(Integer(n)) * b(Integer(n)));
  return taylorExpand(a.modelPtr(), v);
}

/// n -> g(q n).
inline PolynomialSequence dilate(const PolynomialSequence& p, std::int64_t q) {
  std::vector<UnitriangularElement> v;
  for (int n = 0; n <= p.degree(); ++n) v.push_back(p(Integer(q) * n));
  return taylorExpand(p.modelPtr(), v);
}

// ---- level characters and irrationality ------------------------------------------------

/// xi_i(g) = k . psi_i(g) on G_i.
struct LevelCharacter {
  int level = 1;
  std::vector<std::int64_t> k;

  std::int64_t complexity() const {
    std::int64_t c = 0;
    for (auto x : k) c += x < 0 ? -x : x;
    return c;
  }

  Rational operator()(const FilteredNilmanifoldModel& model, const UnitriangularElement& g) const {
    return dot(k, model.levelCoords(g, level));
  }

  nlohmann::json toJson() const { return {{"level", level}, {"k", k}}; }
};

inline bool annihilatesTriangledown(const FilteredNilmanifoldModel& model, int level,
                                    const std::vector<std::int64_t>& k) {
  for (const auto& v : model.levelConstraints(level))
    if (dot(k, v) != 0) return false;
  return true;
}

/// Every non-trivial level-i character of complexity at most A, by increasing
/// complexity and then decreasing lexicographic order.
inline std::vector<LevelCharacter> enumerateCharacters(const FilteredNilmanifoldModel& model, int level,
                                                       std::int64_t bound) {
  detail::require(level >= 1 && level <= model.degree(), "character level must lie in [1, s]");
  const std::size_t r = model.levelRank(level);
  std::vector<LevelCharacter> out;
  if (r == 0) return out;
  std::vector<std::int64_t> k(r, 0);
  // Fill positions pos.. with l1-mass exactly `left`, largest entries first.
  auto fill = [&](auto&& self, std::size_t pos, std::int64_t left) -> void {
    if (pos + 1 == r) {
      for (std::int64_t v : {left, -left}) {
        k[pos] = v;
        if (annihilatesTriangledown(model, level, k)) out.push_back({level, k});
        if (left == 0) break;
      }
      k[pos] = 0;
      return;
    }
    for (std::int64_t v = left; v >= -left; --v) {
      k[pos] = v;
      self(self, pos + 1, left - (v < 0 ? -v : v));
    }
    k[pos] = 0;
  };
  for (std::int64_t c = 1; c <= bound; ++c) fill(fill, 0, c);
  return out;
}

struct IrrationalityReport {
  bool irrational = true;
  std::optional<LevelCharacter> witness;
  std::size_t charactersChecked = 0;

  explicit operator bool() const { return irrational; }
};

/// Exact A-irrationality test: xi_i(g_i) is never an integer for i in [1, s].
inline IrrationalityReport isIrrational(const PolynomialSequence& p, std::int64_t bound) {
  IrrationalityReport rep;
  const auto& model = p.model();
  for (int i = 1; i <= model.degree(); ++i) {
    auto psi = model.levelCoords(p.coefficient(i), i);
    for (const auto& xi : enumerateCharacters(model, i, bound)) {
      ++rep.charactersChecked;
      if (isIntegral(dot(xi.k, psi))) {
        rep.irrational = false;
        rep.witness = xi;
        return rep;
      }
    }
  }
  return rep;
}

/// g_i = g_i' gamma_i with gamma_i in Gamma_i and xi(g_i') = 0.
struct TaylorFactorization {
  LevelCharacter character;
  UnitriangularElement gPrime;
  UnitriangularElement gamma;
  std::vector<Integer> t;  // psi_i(gamma_i)
};

/// Factors a Taylor coefficient annihilated (mod Z) by the given character.
inline TaylorFactorization factorCoefficient(const FilteredNilmanifoldModel& model, const UnitriangularElement& gi,
                                             const LevelCharacter& xi) {
  const int i = xi.level;
  detail::require(i >= 1 && i <= model.degree(), "factorCoefficient: level out of range");
  detail::require(xi.k.size() == model.levelRank(i), "factorCoefficient: frequency vector has the wrong length");
  detail::require(model.inLevel(gi, i), "factorCoefficient: coefficient is not in G_i");
  Rational value = xi(model, gi);
  detail::require(isIntegral(value), "factorCoefficient: xi(g_i) is not an integer");
  auto [h, u] = bezout(xi.k);
  detail::require(h != 0, "factorCoefficient: trivial character");
  Integer v = boost::multiprecision::numerator(value);
  detail::require(v % h == 0, "factorCoefficient: hcf(k) = " + h.str() + " does not divide xi(g_i) = " + v.str() +
                                  "; the hypotheses hcf(k) <= A < p_1(q) must have failed");
  TaylorFactorization out{xi, gi, gi, {}};
  std::vector<Rational> coords(model.dim(), 0);
  for (std::size_t a = 0; a < u.size(); ++a) {
    out.t.push_back(u[a] * (v / h));
    coords[model.levelStart(i) + a] = Rational(out.t.back());
  }
  out.gamma = model.element(coords);
  out.gPrime = gi * out.gamma.inverse();
  detail::ensure(xi(model, out.gPrime) == 0, "factorCoefficient: xi(g_i') is not zero");
  detail::ensure(out.gPrime * out.gamma == gi, "factorCoefficient: g_i' gamma_i != g_i");
  return out;
}

/// Finds a character of complexity <= A that fails on g_i and factors g_i along it;
/// nullopt when g_i is A-irrational. Requires p_1(q) > A.
inline std::optional<TaylorFactorization> factorCoefficient(const FilteredNilmanifoldModel& model, int level,
                                                            const UnitriangularElement& gi, std::int64_t bound,
                                                            std::int64_t q) {
  detail::require(q >= 2 && static_cast<std::int64_t>(smallestPrimeFactor(static_cast<std::uint64_t>(q))) > bound,
                  "factorCoefficient needs p_1(q) > A");
  auto psi = model.levelCoords(gi, level);
  for (const auto& xi : enumerateCharacters(model, level, bound))
    if (isIntegral(dot(xi.k, psi))) return factorCoefficient(model, gi, xi);
  return std::nullopt;
}

/// psi_i(x) lies in Z^{r_i} + V_i, i.e. x is congruent to an element of Gamma_i mod G_i^triangledown.
inline bool integralModTriangledown(const FilteredNilmanifoldModel& model, int level, const UnitriangularElement& x) {
  auto psi = model.levelCoords(x, level);
  for (const auto& w : model.dualLattice(level))
    if (!isIntegral(dot(w, psi))) return false;
  return true;
}

/// Random element of G_level with coordinates p/den, |p| <= range * den.
inline UnitriangularElement randomLevelElement(const FilteredNilmanifoldModel& model, int level, Rng& rng,
                                               std::int64_t den = 12, std::int64_t range = 3) {
  std::vector<Rational> c(model.dim(), 0);
  for (std::size_t j = model.levelStart(level); j < model.dim(); ++j) {
    auto span = static_cast<std::uint64_t>(2 * range * den + 1);
    c[j] = Rational(static_cast<std::int64_t>(rng.below(span)) - range * den, den);
  }
  return model.element(c);
}

inline PolynomialSequence randomPolynomial(ModelPtr model, Rng& rng, std::int64_t den = 12) {
  std::vector<UnitriangularElement> coeffs;
  for (int j = 0; j <= model->degree(); ++j) coeffs.push_back(randomLevelElement(*model, j, rng, den));
  return PolynomialSequence(std::move(model), std::move(coeffs));
}

}  // namespace addcomb
