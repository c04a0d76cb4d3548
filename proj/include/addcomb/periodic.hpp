#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "addcomb/error.hpp"
#include "addcomb/fourier.hpp"
#include "addcomb/nil.hpp"
#include "addcomb/numtheory.hpp"
#include "addcomb/random.hpp"

namespace addcomb {

namespace detail {

inline Integer integerPower(std::int64_t base, std::size_t e) {
  Integer r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

inline void requireRootHypotheses(std::int64_t q, std::int64_t bound, std::size_t rank, const char* what) {
  require(bound >= 1, std::string(what) + ": A must be positive");
  require(q >= 2, std::string(what) + ": q must be at least 2");
  require(Integer(q) >= integerPower(2 * bound, rank),
          std::string(what) + ": needs q >= (2A)^" + std::to_string(rank) + " = " +
              integerPower(2 * bound, rank).str());
  require(static_cast<std::int64_t>(smallestPrimeFactor(static_cast<std::uint64_t>(q))) >= bound,
          std::string(what) + ": needs p_1(q) >= A");
}

}  // namespace detail

struct RootChoice {
  UnitriangularElement w;
  std::vector<std::int64_t> t;  // psi_i(w^q)
  std::uint64_t probes = 0;
  bool swept = false;
};

/// A q-th root w of psi_i^-1(t) in Gamma_i such that h w is A-irrational at level i.
/// t avoids k.t = a_k mod q for every enumerated character k, where
/// a_k = -q k.psi_i(h) mod q whenever that number is an integer.
inline RootChoice irrationalQthRootDetailed(const FilteredNilmanifoldModel& model, int level,
                                            const UnitriangularElement& h, std::int64_t q, std::int64_t bound,
                                            std::uint64_t seed) {
  detail::require(level >= 1 && level <= model.degree(), "irrationalQthRoot: level out of range");
  const std::size_t r = model.levelRank(level);
  detail::requireRootHypotheses(q, bound, r, "irrationalQthRoot");
  detail::require(model.inLevel(h, level), "irrationalQthRoot: h must lie in G_i");

  const auto psiH = model.levelCoords(h, level);
  struct Constraint {
    std::vector<std::int64_t> k;
    std::int64_t a;
  };
  std::vector<Constraint> constraints;
  const auto characters = enumerateCharacters(model, level, bound);
  for (const auto& xi : characters) {
    Rational b = Rational(q) * dot(xi.k, psiH);
    if (isIntegral(b)) constraints.push_back({xi.k, residueOf(-b, q)});
  }
  auto good = [&](const std::vector<std::int64_t>& t) {
    for (const auto& c : constraints) {
      Integer s = 0;
      for (std::size_t j = 0; j < r; ++j) s += Integer(c.k[j]) * t[j];
      Integer rem = s % q;
      if (rem < 0) rem += q;
      if (rem == c.a) return false;
    }
    return true;
  };

  RootChoice out;
  std::vector<std::int64_t> t(r, 0);
  bool found = r == 0 || constraints.empty();
  if (!found) {
    Rng rng(seed);
    const Integer budget = 10 * detail::integerPower(bound + 1, r);
    for (Integer tries = 0; tries < budget && !found; ++tries) {
      for (auto& x : t) x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(q)));
      ++out.probes;
      found = good(t);
    }
  }
  if (!found) {
    out.swept = true;
    std::fill(t.begin(), t.end(), 0);
    for (;;) {
      ++out.probes;
      if (good(t)) {
        found = true;
        break;
      }
      std::size_t j = r;
      while (j-- > 0) {
        if (++t[j] < q) break;
        t[j] = 0;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }
  detail::ensure(found, "irrationalQthRoot: search exhausted although the counting argument guarantees a root");

  std::vector<Rational> coords(model.dim(), 0);
  for (std::size_t j = 0; j < r; ++j) coords[model.levelStart(level) + j] = t[j];
  UnitriangularElement gamma = model.element(coords);
  out.w = power(gamma, Rational(1, q));
  out.t = t;
  detail::ensure(power(out.w, Rational(q)) == gamma && model.inGamma(gamma) && model.inLevel(gamma, level),
                 "irrationalQthRoot: w^q is not in Gamma_i");
  const auto psiHW = model.levelCoords(h * out.w, level);
  for (const auto& xi : characters)
    detail::ensure(!isIntegral(dot(xi.k, psiHW)), "irrationalQthRoot: h w is not A-irrational");
  return out;
}

inline UnitriangularElement irrationalQthRoot(const FilteredNilmanifoldModel& model, int level,
                                              const UnitriangularElement& h, std::int64_t q, std::int64_t bound,
                                              std::uint64_t seed) {
  return irrationalQthRootDetailed(model, level, h, q, bound, seed).w;
}

/// g(n+q)^-1 g(n) in Gamma for every n in [-range, range].
inline bool verifyPeriodicity(const PolynomialSequence& p, std::int64_t q, std::int64_t range) {
  const auto& model = p.model();
  for (std::int64_t n = -range; n <= range; ++n)
    if (!model.inGamma(p(Integer(n + q)).inverse() * p(Integer(n)))) return false;
  return true;
}

struct StageReport {
  int level = 0;
  std::vector<std::int64_t> rootLattice;  // psi_i(w^q)
  std::uint64_t rootProbes = 0;
  bool invariantHolds = false;       // g(n+q)^-1 g(n) in Gamma G_{i+1} on [0, 2q]
  bool lowerCoefficientsKept = false;  // g_j unchanged mod G_i for j < i
  bool levelIrrational = false;      // g_i is A-irrational

  nlohmann::json toJson() const {
    return {{"level", level},
            {"rootLattice", rootLattice},
            {"rootProbes", rootProbes},
            {"invariantHolds", invariantHolds},
            {"lowerCoefficientsKept", lowerCoefficientsKept},
            {"levelIrrational", levelIrrational}};
  }
};

struct PeriodicConstruction {
  PolynomialSequence g;
  std::int64_t q = 0;
  std::int64_t bound = 0;
  std::vector<StageReport> stages;
  bool periodic = false;
  IrrationalityReport irrationality;

  nlohmann::json toJson() const {
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : stages) st.push_back(s.toJson());
    return {{"q", q},
            {"A", bound},
            {"polynomial", g.toJson()},
            {"stages", st},
            {"periodic", periodic},
            {"irrational", irrationality.irrational},
            {"charactersChecked", irrationality.charactersChecked}};
  }
};

/// Builds a q-periodic (mod Gamma), A-irrational polynomial stage by stage.
/// Every claim is re-verified exactly before returning; a failed check is an InternalError.
inline PeriodicConstruction buildPeriodicIrrational(ModelPtr model, std::int64_t q, std::int64_t bound,
                                                    std::uint64_t seed) {
  detail::requireRootHypotheses(q, bound, model->dim(), "buildPeriodicIrrational");
  const int s = model->degree();
  const std::size_t kappa = model->kappa();
  const auto id = UnitriangularElement::identity(kappa);
  Rng rng(seed);

  std::vector<UnitriangularElement> coeffs(s + 1, id);
  PeriodicConstruction out{PolynomialSequence::identity(model), q, bound, {}, false, {}};

  for (int i = 1; i <= s; ++i) {
    StageReport rep;
    rep.level = i;
    // Drop coefficients i..s: they lie in G_i and do not affect anything mod G_i.
    std::vector<UnitriangularElement> lower(coeffs.begin(), coeffs.begin() + i);
    PolynomialSequence g(model, lower);

    std::vector<UnitriangularElement> hv;
    for (int n = 0; n <= s; ++n) hv.push_back(g(Integer(n + q)).inverse() * g(Integer(n)));
    PolynomialSequence h = taylorExpand(model, hv);

    // gamma_j: the integral coordinates of h_j before level i.
    std::vector<UnitriangularElement> gammaCoeffs;
    for (int j = 0; j < i; ++j) {
      auto c = model->malcev(h.coefficient(j));
      for (std::size_t a = 0; a < model->dim(); ++a) {
        if (a < model->levelStart(i))
          detail::ensure(isIntegral(c[a]), "stage " + std::to_string(i) + ": h is not Gamma G_i-valued");
        else
          c[a] = 0;
      }
      gammaCoeffs.push_back(model->element(c));
    }
    PolynomialSequence gammaPoly(model, gammaCoeffs);
    std::vector<UnitriangularElement> htv;
    for (int n = 0; n <= s; ++n) htv.push_back(gammaPoly(Integer(n)).inverse() * hv[n]);
    PolynomialSequence ht = taylorExpand(model, htv);
    for (int j = 0; j <= s; ++j)
      detail::ensure(model->inLevel(ht.coefficient(j), i), "stage " + std::to_string(i) + ": h~ is not G_i-valued");
    detail::ensure(model->inLevel(ht.coefficient(i), i + 1),
                   "stage " + std::to_string(i) + ": h~_i is not in G_{i+1}");

    // l_j^q prod_{k>j} l_k^C(q, k-j+1) = h~_{j-1}, solved from j = i downwards.
    std::vector<UnitriangularElement> ell(i + 1, id);
    for (int j = i; j >= 1; --j) {
      UnitriangularElement rest = id;
      for (int k = j + 1; k <= i; ++k)
        rest = rest * power(ell[k], Rational(binomial(Integer(q), static_cast<unsigned>(k - j + 1))));
      ell[j] = power(ht.coefficient(j - 1) * rest.inverse(), Rational(1, q));
    }
    PolynomialSequence ellPoly(model, ell);

    auto root = irrationalQthRootDetailed(*model, i, ell[i], q, bound, rng.fork());
    rep.rootLattice = root.t;
    rep.rootProbes = root.probes;
    auto logW = logOf(root.w);

    std::vector<UnitriangularElement> nv;
    for (int n = 0; n <= s; ++n) {
      Integer e = binomial(Integer(n), static_cast<unsigned>(i));
      nv.push_back(g(Integer(n)) * ellPoly(Integer(n)) * expOf(Rational(e) * logW));
    }
    PolynomialSequence next = taylorExpand(model, nv);

    rep.invariantHolds = true;
    for (std::int64_t n = 0; n <= 2 * q && rep.invariantHolds; ++n)
      rep.invariantHolds = model->inGammaTimesLevel(next(Integer(n + q)).inverse() * next(Integer(n)), i + 1);
    rep.lowerCoefficientsKept = true;
    for (int j = 0; j < i; ++j)
      rep.lowerCoefficientsKept =
          rep.lowerCoefficientsKept && model->inLevel(coeffs[j].inverse() * next.coefficient(j), i);
    rep.levelIrrational = true;
    auto psi = model->levelCoords(next.coefficient(i), i);
    for (const auto& xi : enumerateCharacters(*model, i, bound))
      if (isIntegral(dot(xi.k, psi))) rep.levelIrrational = false;
    detail::ensure(rep.invariantHolds, "stage " + std::to_string(i) + ": periodicity invariant failed");
    detail::ensure(rep.lowerCoefficientsKept, "stage " + std::to_string(i) + ": lower coefficients changed");
    detail::ensure(rep.levelIrrational, "stage " + std::to_string(i) + ": coefficient is not A-irrational");

    coeffs = next.coefficients();
    out.stages.push_back(std::move(rep));
  }

  out.g = PolynomialSequence(model, coeffs);
  out.periodic = verifyPeriodicity(out.g, q, 2 * q);
  out.irrationality = isIrrational(out.g, bound);
  detail::ensure(out.periodic, "constructed polynomial is not q-periodic mod Gamma");
  detail::ensure(out.irrationality.irrational, "constructed polynomial is not A-irrational");
  return out;
}

// ---- exact exponential sums ----------------------------------------------------------

namespace detail {

inline bool addOverflows(std::int64_t& acc, std::int64_t x) { return __builtin_add_overflow(acc, x, &acc); }

/// Phi_D as a coefficient vector (ascending), or nullopt when an int64 intermediate overflows.
inline std::optional<std::vector<std::int64_t>> cyclotomic(std::int64_t d) {
  if (d == 1) return std::vector<std::int64_t>{-1, 1};
  std::int64_t deg = 0;
  for (std::int64_t a = 1; a <= d; ++a)
    if (std::gcd(a, d) == 1) ++deg;
  std::vector<std::int64_t> c(deg + 1, 0);
  c[0] = 1;
  // Phi_D = prod_{e | D} (1 - x^e)^mu(D/e), computed as a power series truncated at deg.
  for (auto e64 : divisors(static_cast<std::uint64_t>(d))) {
    const auto e = static_cast<std::int64_t>(e64);
    const int mu = mobius(static_cast<std::uint64_t>(d / e));
    if (mu == 1) {
      for (std::int64_t n = deg; n >= e; --n)
        if (__builtin_sub_overflow(c[n], c[n - e], &c[n])) return std::nullopt;
    } else if (mu == -1) {
      for (std::int64_t n = e; n <= deg; ++n)
        if (addOverflows(c[n], c[n - e])) return std::nullopt;
    }
  }
  return c;
}

/// Whether sum_a counts[a] zeta_D^a vanishes; nullopt when the exact test overflowed.
inline std::optional<bool> rootSumVanishes(std::vector<std::int64_t> counts) {
  const auto d = static_cast<std::int64_t>(counts.size());
  auto phi = cyclotomic(d);
  if (!phi) return std::nullopt;
  const auto deg = static_cast<std::int64_t>(phi->size()) - 1;
  for (std::int64_t top = d - 1; top >= deg; --top) {
    std::int64_t lead = counts[top];
    if (lead == 0) continue;
    for (std::int64_t j = 0; j <= deg; ++j) {
      std::int64_t prod;
      if (__builtin_mul_overflow(lead, (*phi)[j], &prod)) return std::nullopt;
      if (__builtin_sub_overflow(counts[top - deg + j], prod, &counts[top - deg + j])) return std::nullopt;
    }
  }
  for (std::int64_t j = 0; j < deg; ++j)
    if (counts[j] != 0) return false;
  return true;
}

}  // namespace detail

struct ExponentialSum {
  std::complex<double> value;
  bool exactZero = false;
  /// False when the exact test was skipped (denominator too large) and zero was decided numerically.
  bool decidedExactly = true;
  std::int64_t denominator = 1;

  nlohmann::json toJson() const {
    return {{"re", value.real()},           {"im", value.imag()},   {"abs", std::abs(value)},
            {"exactZero", exactZero},       {"decidedExactly", decidedExactly},
            {"denominator", denominator}};
  }
};

/// E_{n in [count]} e(phase_n) with exact rational phases; exact zero detection via Phi_D.
inline ExponentialSum exactExponentialAverage(const std::vector<Rational>& phases, std::int64_t maxExactDenominator = 5000) {
  ExponentialSum out;
  Integer lcmDen = 1;
  for (const auto& p : phases) lcmDen = boost::multiprecision::lcm(lcmDen, boost::multiprecision::denominator(p));
  std::vector<Rational> reduced;
  for (const auto& p : phases) reduced.push_back(fracOf(p));
  long double re = 0, im = 0;
  for (const auto& p : reduced) {
    long double theta = 2.0L * 3.14159265358979323846264338327950288L * static_cast<long double>(toDouble(p));
    re += std::cos(theta);
    im += std::sin(theta);
  }
  const auto count = static_cast<long double>(phases.size());
  out.value = {static_cast<double>(re / count), static_cast<double>(im / count)};
  if (lcmDen <= maxExactDenominator) {
    out.denominator = lcmDen.convert_to<std::int64_t>();
    std::vector<std::int64_t> counts(out.denominator, 0);
    for (const auto& p : reduced)
      ++counts[(boost::multiprecision::numerator(p) * (lcmDen / boost::multiprecision::denominator(p)))
                   .convert_to<std::int64_t>()];
    auto vanishes = detail::rootSumVanishes(counts);
    if (vanishes) {
      out.exactZero = *vanishes;
      if (out.exactZero) out.value = 0;
      return out;
    }
  } else {
    out.denominator = -1;
  }
  out.decidedExactly = false;
  out.exactZero = std::abs(out.value) < 1e-12;
  return out;
}

/// Mal'cev coordinates of {g(n)} for n in [0, q), after checking q-periodicity mod Gamma on that range.
inline std::vector<std::vector<Rational>> periodicOrbit(const PolynomialSequence& p, std::int64_t q) {
  const auto& model = p.model();
  detail::require(q >= 1, "q must be positive");
  std::vector<std::vector<Rational>> orbit;
  for (std::int64_t n = 0; n < q; ++n) {
    auto gn = p(Integer(n));
    detail::require(model.inGamma(p(Integer(n + q)).inverse() * gn), "sequence is not q-periodic");
    orbit.push_back(model.malcev(fracIntParts(model, gn).first));
  }
  return orbit;
}

/// E_{n in [q]} e(k . horizontal coordinates of {g(n)}) for each level-1 character.
inline std::vector<ExponentialSum> characterSums(const PolynomialSequence& p, const std::vector<LevelCharacter>& chars,
                                                 std::int64_t q) {
  const auto& model = p.model();
  for (const auto& xi : chars) {
    detail::require(xi.level == 1, "characterSum needs a level-1 character");
    detail::require(xi.k.size() == model.levelRank(1), "characterSum: frequency vector has the wrong length");
  }
  const auto orbit = periodicOrbit(p, q);
  std::vector<ExponentialSum> out;
  for (const auto& xi : chars) {
    std::vector<Rational> phases;
    for (const auto& c : orbit)
      phases.push_back(
          dot(xi.k, std::vector<Rational>(c.begin() + model.levelStart(1), c.begin() + model.levelStart(2))));
    out.push_back(exactExponentialAverage(phases));
  }
  return out;
}

inline ExponentialSum characterSum(const PolynomialSequence& p, const LevelCharacter& xi, std::int64_t q) {
  return characterSums(p, {xi}, q).front();
}

struct VerticalSumReport {
  double value = 0;
  double tolerance = 0;  // 2 / sqrt(q), an empirical calibration
  bool withinTolerance = false;

  nlohmann::json toJson() const {
    return {{"value", value}, {"tolerance", tolerance}, {"toleranceIsCalibration", true},
            {"withinTolerance", withinTolerance}};
  }
};

/// |E_{n in [q]} e(last Mal'cev coordinate of {g(n)})|.
inline VerticalSumReport verticalSum(const PolynomialSequence& p, std::int64_t q) {
  const auto& model = p.model();
  detail::require(q >= 1, "verticalSum: q must be positive");
  std::vector<Rational> phases;
  for (std::int64_t n = 0; n < q; ++n) phases.push_back(model.malcev(fracIntParts(model, p(Integer(n))).first).back());
  VerticalSumReport rep;
  rep.value = std::abs(exactExponentialAverage(phases).value);
  rep.tolerance = 2.0 / std::sqrt(static_cast<double>(q));
  rep.withinTolerance = rep.value <= rep.tolerance;
  return rep;
}

}  // namespace addcomb
