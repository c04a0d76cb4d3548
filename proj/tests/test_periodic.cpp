#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "addcomb/periodic.hpp"

using namespace addcomb;

namespace {

std::complex<double> numericRootSum(const std::vector<std::int64_t>& counts) {
  std::complex<double> s = 0;
  const double d = static_cast<double>(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a)
    s += static_cast<double>(counts[a]) * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(a) / d);
  return s;
}

}  // namespace

TEST(Periodic, CyclotomicPolynomials) {
  using V = std::vector<std::int64_t>;
  EXPECT_EQ(*detail::cyclotomic(1), (V{-1, 1}));
  EXPECT_EQ(*detail::cyclotomic(2), (V{1, 1}));
  EXPECT_EQ(*detail::cyclotomic(4), (V{1, 0, 1}));
  EXPECT_EQ(*detail::cyclotomic(6), (V{1, -1, 1}));
  EXPECT_EQ(*detail::cyclotomic(12), (V{1, 0, -1, 0, 1}));
  // Phi_105 is the first with a coefficient -2.
  auto phi105 = *detail::cyclotomic(105);
  EXPECT_EQ(phi105.size(), 49u);
  EXPECT_EQ(phi105[7], -2);
  EXPECT_EQ(phi105[41], -2);
}

TEST(Periodic, RootSumsAgreeWithFloatingPoint) {
  Rng rng(11);
  int zeros = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto d = static_cast<std::size_t>(1 + rng.below(30));
    std::vector<std::int64_t> c(d);
    for (auto& x : c) x = static_cast<std::int64_t>(rng.below(3));
    if (trial % 4 == 0) {
      // Plant a vanishing sum: a full coset of a subgroup.
      std::fill(c.begin(), c.end(), 0);
      const std::size_t step = d / static_cast<std::size_t>(divisors(d).size() > 1 ? divisors(d)[1] : 1);
      if (step < d)
        for (std::size_t a = rng.below(step); a < d; a += step) c[a] += 1;
    }
    auto exact = detail::rootSumVanishes(c);
    ASSERT_TRUE(exact.has_value());
    EXPECT_EQ(*exact, std::abs(numericRootSum(c)) < 1e-9) << "d=" << d;
    zeros += *exact;
  }
  EXPECT_GT(zeros, 50);
}

TEST(Periodic, ExponentialAverage) {
  std::vector<Rational> phases;
  for (int n = 0; n < 7; ++n) phases.push_back(Rational(3 * n, 7));
  auto s = exactExponentialAverage(phases);
  EXPECT_TRUE(s.exactZero);
  EXPECT_TRUE(s.decidedExactly);
  EXPECT_EQ(s.denominator, 7);

  auto one = exactExponentialAverage({Rational(5), Rational(-2)});
  EXPECT_FALSE(one.exactZero);
  EXPECT_NEAR(one.value.real(), 1.0, 1e-15);

  auto big = exactExponentialAverage({Rational(1, 100003), Rational(1, 100003) + Rational(1, 2)});
  EXPECT_FALSE(big.decidedExactly);
  EXPECT_TRUE(big.exactZero);
}

TEST(Periodic, QthRootPreconditions) {
  auto t = models::torus(2, 1);
  auto id = UnitriangularElement::identity(t->kappa());
  EXPECT_THROW(irrationalQthRoot(*t, 1, id, 15, 2, 1), InputError);  // 15 < 16
  EXPECT_THROW(irrationalQthRoot(*t, 1, id, 21, 4, 1), InputError);  // 3 < 4
  EXPECT_NO_THROW(irrationalQthRoot(*t, 1, id, 17, 2, 1));
}

TEST(Periodic, QthRootIsIrrational) {
  auto h = models::heisenbergLcs();
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = randomLevelElement(*h, 1, rng);
    auto res = irrationalQthRootDetailed(*h, 1, x, 67, 2, rng.fork());
    auto gamma = power(res.w, Rational(67));
    EXPECT_TRUE(h->inGamma(gamma));
    for (const auto& xi : enumerateCharacters(*h, 1, 2))
      EXPECT_FALSE(isIntegral(dot(xi.k, h->levelCoords(x * res.w, 1))));
  }
}

TEST(Periodic, SweepFallbackFindsRoot) {
  // Every character rules out one class mod q; with q tight the search still succeeds.
  auto t = models::torus(1, 1);
  auto id = UnitriangularElement::identity(t->kappa());
  auto res = irrationalQthRootDetailed(*t, 1, id, 5, 2, 3);
  ASSERT_EQ(res.t.size(), 1u);
  EXPECT_NE(res.t[0], 0);
}

TEST(Periodic, VerifyPeriodicity) {
  auto t = models::torus(1, 1);
  auto p = PolynomialSequence(t, {UnitriangularElement::identity(t->kappa()), t->element({Rational(2, 5)})});
  EXPECT_TRUE(verifyPeriodicity(p, 5, 10));
  EXPECT_FALSE(verifyPeriodicity(p, 3, 10));
  EXPECT_THROW(characterSum(p, {1, {1}}, 3), InputError);
  EXPECT_THROW(characterSum(p, {1, {1, 0}}, 5), InputError);
}

TEST(Periodic, TorusConstruction) {
  auto t = models::torus(2, 2);
  auto c = buildPeriodicIrrational(t, 37, 2, 42);
  EXPECT_TRUE(c.periodic);
  EXPECT_TRUE(c.irrationality.irrational);
  ASSERT_EQ(c.stages.size(), 2u);
  for (const auto& st : c.stages) {
    EXPECT_TRUE(st.invariantHolds);
    EXPECT_TRUE(st.lowerCoefficientsKept);
    EXPECT_TRUE(st.levelIrrational);
  }
  EXPECT_TRUE(verifyPeriodicity(c.g, 37, 74));
  auto chars = enumerateCharacters(*t, 1, 2);
  for (const auto& s : characterSums(c.g, chars, 37)) {
    EXPECT_TRUE(s.exactZero);
    EXPECT_TRUE(s.decidedExactly);
  }
  EXPECT_THROW(buildPeriodicIrrational(t, 15, 2, 1), InputError);
}

TEST(Periodic, HeisenbergConstruction) {
  auto h = models::heisenbergLcs();
  auto c = buildPeriodicIrrational(h, 67, 2, 9);
  EXPECT_TRUE(c.periodic);
  EXPECT_TRUE(c.irrationality.irrational);
  for (const auto& s : characterSums(c.g, enumerateCharacters(*h, 1, 2), 67)) EXPECT_TRUE(s.exactZero);
  auto v = verticalSum(c.g, 67);
  EXPECT_LE(v.value, 1.0 + 1e-12);
  EXPECT_NEAR(v.tolerance, 2 / std::sqrt(67.0), 1e-15);
}

TEST(Periodic, DeterministicInSeed) {
  auto t = models::torus(2, 2);
  auto a = buildPeriodicIrrational(t, 37, 2, 3);
  auto b = buildPeriodicIrrational(t, 37, 2, 3);
  EXPECT_EQ(a.toJson(), b.toJson());
}

TEST(Periodic, DegreeThreeModel) {
  auto h = models::heisenbergDeg3();
  auto c = buildPeriodicIrrational(h, 67, 2, 1);
  EXPECT_TRUE(c.periodic);
  EXPECT_TRUE(isIrrational(c.g, 2).irrational);
  EXPECT_EQ(c.stages.size(), 3u);
}
