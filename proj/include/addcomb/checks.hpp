#pragma once

// Randomised exact self-checks of the polynomial-sequence calculus. Each call draws
// one instance from the generator and returns whether the identity held.

#include <cstdint>
#include <vector>

#include "addcomb/nil.hpp"
#include "addcomb/random.hpp"

namespace addcomb::checks {

/// taylorExpand(sampleValues(p)) == p, and the expansion agrees with p off the sample points.
inline bool expandEvalRoundTrip(const ModelPtr& model, Rng& rng) {
  auto p = randomPolynomial(model, rng);
  auto back = taylorExpand(model, sampleValues(p, model->degree() + 1));
  if (back.coefficients() != p.coefficients()) return false;
  for (std::int64_t n : {-5, 7, 12})
    if (back(Integer(n)) != p(Integer(n))) return false;
  return true;
}

/// n -> g(n+q)^-1 g(n) is a polynomial for the shifted filtration: its i-th coefficient lies in G_{i+1}.
inline bool shiftedTaylor(const ModelPtr& model, Rng& rng) {
  auto g = randomPolynomial(model, rng);
  const auto q = static_cast<std::int64_t>(rng.below(20)) + 1;
  std::vector<UnitriangularElement> values;
  for (int n = 0; n <= model->degree(); ++n) values.push_back(g(Integer(n + q)).inverse() * g(Integer(n)));
  auto h = taylorExpand(model, values, 1);
  for (int i = 0; i <= model->degree(); ++i)
    if (!model->inLevel(h.coefficient(i), i + 1)) return false;
  return true;
}

/// If g(qZ) lies in Gamma then g_i^{q^i} is integral modulo G_i^triangledown.
/// Instances come from g(n) = gamma(n/q) for a Gamma-valued polynomial gamma.
inline bool newtonLemma(const ModelPtr& model, Rng& rng) {
  std::vector<UnitriangularElement> gammaCoeffs;
  for (int j = 0; j <= model->degree(); ++j) gammaCoeffs.push_back(randomLevelElement(*model, j, rng, 1));
  PolynomialSequence gamma(model, gammaCoeffs);
  const auto q = static_cast<std::int64_t>(rng.below(5)) + 2;
  std::vector<UnitriangularElement> values;
  for (int n = 0; n <= model->degree(); ++n) {
    UnitriangularElement v = gamma.coefficient(0);
    for (int j = 1; j <= model->degree(); ++j) {
      Rational e = 1;
      for (int a = 0; a < j; ++a) e *= Rational(n, q) - a;
      for (int a = 1; a <= j; ++a) e /= a;
      v = v * power(gamma.coefficient(j), e);
    }
    values.push_back(v);
  }
  auto g = taylorExpand(model, values);
  for (std::int64_t n = -3; n <= 3; ++n)
    if (!model->inGamma(g(Integer(q) * n))) return false;
  Integer qi = 1;
  for (int i = 1; i <= model->degree(); ++i) {
    qi *= q;
    if (!integralModTriangledown(*model, i, power(g.coefficient(i), Rational(qi)))) return false;
  }
  return true;
}

/// Plants a coefficient with xi(g_i) in hcf(k) Z and checks the factorisation g_i = g_i' gamma_i.
/// Returns false (without a check) if the model has no level with characters of complexity <= bound.
inline bool plantedFactorization(const ModelPtr& model, Rng& rng, std::int64_t bound) {
  std::vector<int> levels;
  for (int i = 1; i <= model->degree(); ++i)
    if (!enumerateCharacters(*model, i, bound).empty()) levels.push_back(i);
  if (levels.empty()) return false;
  const int level = levels[rng.below(levels.size())];
  const auto chars = enumerateCharacters(*model, level, bound);
  const auto& xi = chars[rng.below(chars.size())];
  auto coords = model->malcev(randomLevelElement(*model, level, rng));
  std::size_t j = 0;
  while (xi.k[j] == 0) ++j;
  const Integer target = bezout(xi.k).first * (static_cast<std::int64_t>(rng.below(11)) - 5);
  std::vector<Rational> psi(coords.begin() + model->levelStart(level),
                            coords.begin() + model->levelStart(level) + model->levelRank(level));
  coords[model->levelStart(level) + j] += (Rational(target) - dot(xi.k, psi)) / xi.k[j];
  auto gi = model->element(coords);
  if (xi(*model, gi) != Rational(target)) return false;

  auto f = factorCoefficient(*model, gi, xi);
  if (!model->inGamma(f.gamma) || !model->inLevel(f.gamma, level)) return false;
  if (xi(*model, f.gPrime) != 0) return false;
  return f.gPrime * f.gamma == gi;
}

}  // namespace addcomb::checks
