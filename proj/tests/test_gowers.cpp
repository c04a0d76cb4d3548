#include <gtest/gtest.h>

#include <algorithm>

#include "addcomb/gowers.hpp"

using namespace addcomb;

namespace {

CyclicFunction randomComplex(std::int64_t n, Rng& rng) {
  std::vector<std::complex<double>> v(n);
  for (auto& x : v) x = std::polar(rng.unit(), 6.283185307179586 * rng.unit());
  return CyclicFunction(std::move(v));
}

CyclicFunction randomDensity(std::int64_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.unit();
  return CyclicFunction::fromReal(v);
}

CyclicFunction character(std::int64_t n, std::int64_t r) {
  std::vector<std::complex<double>> v(n);
  for (std::int64_t x = 0; x < n; ++x) v[x] = unitPhase(static_cast<double>(r * x % n) / n);
  return CyclicFunction(std::move(v));
}

}  // namespace

TEST(Gowers, ConstantFunction) {
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(gowersNorm(CyclicFunction::constant(11, 0.7), d), 0.7, 1e-12);
}

TEST(Gowers, CharactersHaveUnitNorm) {
  for (std::int64_t r : {0, 1, 3, 7})
    for (int d = 2; d <= 4; ++d) {
      EXPECT_NEAR(gowersNorm(character(13, r), d), 1.0, 1e-10);
      EXPECT_NEAR(gowersNormDefinitional(character(13, r), d), 1.0, 1e-10);
    }
}

TEST(Gowers, U1IsMeanMagnitude) {
  EXPECT_NEAR(gowersNorm(CyclicFunction::indicator(SubsetOfZN(8, {0})), 1), 0.125, 1e-15);
  EXPECT_NEAR(gowersNormDefinitional(CyclicFunction::indicator(SubsetOfZN(8, {0})), 1), 0.125, 1e-12);
}

TEST(Gowers, DefinitionalExamples) {
  EXPECT_EQ(gowersNormDefinitional(CyclicFunction::constant(7, 0.0), 3), 0.0);
  EXPECT_NEAR(gowersNormDefinitional(CyclicFunction::indicator(SubsetOfZN::full(5)), 3), 1.0, 1e-12);
  EXPECT_THROW(gowersNormDefinitional(CyclicFunction::constant(200, 0.5), 4), BudgetExceeded);
  EXPECT_THROW(gowersNorm(CyclicFunction::constant(5, 0.5), 0), InputError);
}

TEST(Gowers, FastMatchesDefinitional) {
  Rng rng(4);
  for (std::int64_t n = 1; n <= 20; n += 3)
    for (int d = 1; d <= 4; ++d)
      for (int trial = 0; trial < 3; ++trial) {
        auto f = randomComplex(n, rng);
        EXPECT_NEAR(gowersNorm(f, d), gowersNormDefinitional(f, d), 1e-9) << "N=" << n << " d=" << d;
      }
}

TEST(Gowers, Nesting) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = randomComplex(17, rng);
    for (int d = 1; d <= 3; ++d) EXPECT_LE(gowersNorm(f, d), gowersNorm(f, d + 1) + 1e-9);
  }
}

TEST(Gowers, ModulationAndTranslationInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = randomComplex(19, rng);
    auto chi = character(19, 5);
    std::vector<std::complex<double>> mod(19);
    for (int x = 0; x < 19; ++x) mod[x] = f.values()[x] * chi.values()[x];
    EXPECT_NEAR(gowersNorm(CyclicFunction(mod), 2), gowersNorm(f, 2), 1e-9);
    for (int d = 1; d <= 3; ++d) EXPECT_NEAR(gowersNorm(f.translated(7), d), gowersNorm(f, d), 1e-9);
  }
}

TEST(Gowers, GvnCheckPassesOnRandomPairs) {
  Rng rng(100);
  auto f = randomDensity(53, rng);
  auto same = gvnCheck(f, f, systems::threeAP(), 1);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_EQ(same.rhs, 0.0);
  EXPECT_TRUE(same.pass);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_TRUE(gvnCheck(randomDensity(53, rng), randomDensity(53, rng), systems::threeAP(), 1).pass);
    EXPECT_TRUE(gvnCheck(randomDensity(31, rng), randomDensity(31, rng), systems::fourAP(), 2).pass);
  }
  EXPECT_THROW(gvnCheck(f, f, systems::dependentPair(2), 1), InputError);
  auto g = randomDensity(51, rng);
  EXPECT_THROW(gvnCheck(g, g, systems::threeAP(), 1), InputError);
}

TEST(Gowers, RandomRoundExtremes) {
  EXPECT_EQ(randomRound(CyclicFunction::constant(9, 1.0), 3), SubsetOfZN::full(9));
  EXPECT_TRUE(randomRound(CyclicFunction::constant(9, 0.0), 3).empty());
  auto a = randomRound(CyclicFunction::constant(101, 0.5), 42);
  EXPECT_EQ(a, randomRound(CyclicFunction::constant(101, 0.5), 42));
}

TEST(Gowers, RandomRoundIsUniform) {
  const std::int64_t n = 4093;
  auto half = CyclicFunction::constant(n, 0.5);
  std::vector<double> norms;
  for (std::uint64_t seed = 0; seed < 11; ++seed) {
    auto a = CyclicFunction::indicator(randomRound(half, seed));
    std::vector<std::complex<double>> diff(n);
    for (std::int64_t x = 0; x < n; ++x) diff[x] = a.values()[x] - 0.5;
    norms.push_back(gowersNorm(CyclicFunction(diff), 2));
  }
  std::nth_element(norms.begin(), norms.begin() + 5, norms.end());
  EXPECT_LE(norms[5], 5 * std::pow(double(n), -0.25));
}
