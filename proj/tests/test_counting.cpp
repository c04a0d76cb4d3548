#include <gtest/gtest.h>

#include <sstream>

#include "addcomb/counting.hpp"
#include "addcomb/random.hpp"

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

SubsetOfZN randomSet(std::int64_t n, Rng& rng) {
  std::vector<std::int64_t> m;
  for (std::int64_t x = 0; x < n; ++x)
    if (rng.below(2)) m.push_back(x);
  return SubsetOfZN(n, m);
}

}  // namespace

TEST(Counting, SubsetValidation) {
  EXPECT_THROW(SubsetOfZN(5, {5}), InputError);
  EXPECT_THROW(SubsetOfZN(5, {1, 1}), InputError);
  EXPECT_EQ(SubsetOfZN(5, {3, 1}).members(), (std::vector<std::int64_t>{1, 3}));
  EXPECT_THROW(CyclicFunction::fromReal({0.5, 1.5}), InputError);
}

TEST(Counting, BruteExamples) {
  auto ap = systems::threeAP();
  auto full = solBrute(SubsetOfZN::full(7), ap);
  EXPECT_EQ(full.exact(), Rational(1));
  auto a = solBrute(SubsetOfZN(5, {0, 1}), ap);
  EXPECT_EQ(*a.count, 2u);
  EXPECT_EQ(a.exact(), Rational(2, 25));
  EXPECT_DOUBLE_EQ(a.value.real(), 0.08);
  EXPECT_EQ(solBrute(SubsetOfZN(5, {2, 3, 4}), ap).exact(), Rational(1, 5));
}

TEST(Counting, BruteRejectsMismatchAndBudget) {
  std::vector<CyclicFunction> fs{CyclicFunction::constant(5, 1.0), CyclicFunction::constant(7, 1.0),
                                 CyclicFunction::constant(5, 1.0)};
  EXPECT_THROW(solBrute(fs, systems::threeAP()), InputError);
  EXPECT_THROW(solBrute(SubsetOfZN::full(100), systems::threeAP(), {.maxBruteIterations = 1000}), BudgetExceeded);
}

TEST(Counting, FastMatchesBrute) {
  Rng rng(11);
  std::vector<LinearFormSystem> systemsUnderTest{systems::threeAP(), systems::fourAP(), systems::xPlusYMinus3Z(),
                                                 systems::dependentPair(2),
                                                 LinearFormSystem({{1, 0}, {0, 1}, {1, 1}})};
  for (const auto& s : systemsUnderTest) {
    auto kp = kernelize(s);
    for (std::int64_t n : {53, 101}) {
      std::vector<CyclicFunction> fs;
      for (std::size_t i = 0; i < s.formCount(); ++i) fs.push_back(randomComplex(n, rng));
      auto brute = solBrute(fs, s).value;
      auto fast = solFast(fs, s, kp);
      EXPECT_LE(std::abs(brute - fast), 1e-9) << s.name() << " N=" << n;
    }
  }
}

TEST(Counting, FastOnIndicators) {
  Rng rng(5);
  auto ap = systems::threeAP();
  auto kp = kernelize(ap);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = randomSet(53, rng);
    EXPECT_NEAR(solFast(CyclicFunction::indicator(a), ap, kp).real(), solBrute(a, ap).value.real(), 1e-12);
  }
}

TEST(Counting, FastRejectsBadModulus) {
  auto s = LinearFormSystem({{1, 0}, {1, 2}});
  auto kp = kernelize(s);
  EXPECT_THROW(solFast(CyclicFunction::constant(10, 0.5), s, kp), InputError);
  EXPECT_NEAR(std::abs(solFast(CyclicFunction::constant(11, 0.5), s, kp) - 0.25), 0, 1e-12);
}

TEST(Counting, ConstantGivesPower) {
  auto s = systems::fourAP();
  auto kp = kernelize(s);
  std::complex<double> c(0.3, -0.4);
  EXPECT_LE(std::abs(solFast(CyclicFunction::constant(17, c), s, kp) - std::pow(c, 4)), 1e-12);
  EXPECT_LE(std::abs(solBrute(CyclicFunction::constant(17, c), s).value - std::pow(c, 4)), 1e-12);
}

TEST(Counting, Multilinearity) {
  Rng rng(3);
  auto s = systems::threeAP();
  const std::int64_t n = 23;
  for (int trial = 0; trial < 5; ++trial) {
    auto f = randomComplex(n, rng), g = randomComplex(n, rng), h = randomComplex(n, rng), k = randomComplex(n, rng);
    std::complex<double> a(0.3, 0.1), b(0.2, -0.5);
    std::vector<std::complex<double>> mix(n);
    for (std::int64_t x = 0; x < n; ++x) mix[x] = a * f.values()[x] + b * g.values()[x];
    std::vector<CyclicFunction> lhs{CyclicFunction(mix), h, k}, left{f, h, k}, right{g, h, k};
    auto expected = a * solBrute(left, s).value + b * solBrute(right, s).value;
    EXPECT_LE(std::abs(solBrute(lhs, s).value - expected), 1e-12);
  }
}

TEST(Counting, TranslationInvarianceForInvariantSystems) {
  Rng rng(9);
  for (const auto& s : {systems::threeAP(), systems::fourAP()}) {
    ASSERT_TRUE(isInvariant(s));
    auto a = randomSet(13, rng);
    auto f = CyclicFunction::indicator(a);
    auto base = solBrute(f, s).exact();
    for (std::int64_t c = 1; c < 13; ++c) EXPECT_EQ(solBrute(f.translated(c), s).exact(), base);
  }
}

TEST(Counting, L1Inequality) {
  Rng rng(21);
  // N = 53 has no prime factor below any coefficient used here.
  for (const auto& s : {systems::threeAP(), systems::xPlusYMinus3Z()}) {
    const double l = static_cast<double>(size(s));
    for (int trial = 0; trial < 20; ++trial) {
      auto f = randomDensity(53, rng), g = randomDensity(53, rng);
      double lhs = std::abs(solBrute(f, s).value - solBrute(g, s).value);
      EXPECT_LE(lhs, l * l1Deviation(f, g) + 1e-12);
    }
  }
}

TEST(Counting, L1DeviationExamples) {
  auto f = CyclicFunction::constant(4, 1.0), z = CyclicFunction::constant(4, 0.0);
  EXPECT_DOUBLE_EQ(l1Deviation(f, f), 0.0);
  EXPECT_DOUBLE_EQ(l1Deviation(f, z), 1.0);
  EXPECT_DOUBLE_EQ(l1Deviation(CyclicFunction::indicator(SubsetOfZN(4, {0})), z), 0.25);
  EXPECT_THROW(l1Deviation(f, CyclicFunction::constant(5, 0.0)), InputError);
}

TEST(Counting, ComplementIdentity) {
  auto [a, b] = complementSol(SubsetOfZN(5, {0, 1}));
  EXPECT_EQ(a, Rational(2, 25));
  EXPECT_EQ(b, Rational(5, 25));
  EXPECT_EQ(complementSol(SubsetOfZN(7, {})), std::make_pair(Rational(0), Rational(1)));
  EXPECT_EQ(complementSol(SubsetOfZN::full(7)), std::make_pair(Rational(1), Rational(0)));
  EXPECT_THROW(complementSol(SubsetOfZN(6, {})), InputError);
  Rng rng(1);
  for (std::int64_t n = 5; n <= 41; n += 2) {
    auto s = randomSet(n, rng);
    auto [x, y] = complementSol(s);
    Rational alpha = s.density();
    EXPECT_EQ(x + y, 1 - 3 * alpha + 3 * alpha * alpha);
  }
}

TEST(Counting, SetFileFormat) {
  std::istringstream in("N 10\n3\n1\n# comment\n\n7\n");
  auto a = parseSet(in);
  EXPECT_EQ(a.modulus(), 10);
  EXPECT_EQ(a.members(), (std::vector<std::int64_t>{1, 3, 7}));
  std::ostringstream out;
  writeSet(out, a);
  EXPECT_EQ(out.str(), "N 10\n1\n3\n7\n");
  std::istringstream bad("3\n4\n");
  EXPECT_THROW(parseSet(bad), InputError);
  std::istringstream outOfRange("N 4\n4\n");
  EXPECT_THROW(parseSet(outOfRange), InputError);
}

TEST(Counting, FunctionCsvFormat) {
  std::istringstream in("index,value\n1,0.5\n0,0.25\n2,1\n");
  auto f = parseFunctionCsv(in);
  EXPECT_EQ(f.modulus(), 3);
  EXPECT_DOUBLE_EQ(f.values()[0].real(), 0.25);
  std::istringstream gap("0,0.5\n2,0.5\n");
  EXPECT_THROW(parseFunctionCsv(gap), InputError);
}
