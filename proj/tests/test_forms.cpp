#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "addcomb/forms.hpp"

using namespace addcomb;
using Rows = std::vector<std::vector<std::int64_t>>;

namespace {

std::set<std::vector<std::int64_t>> kernelSet(const KernelPresentation& kp, std::int64_t n) {
  std::set<std::vector<std::int64_t>> out;
  const std::size_t t = kp.formCount;
  std::vector<std::int64_t> y(t, 0);
  for (;;) {
    if (kp.annihilates(y, n)) out.insert(y);
    std::size_t i = t;
    while (i-- > 0) {
      if (++y[i] < n) break;
      y[i] = 0;
      if (i == 0) return out;
    }
  }
}

std::set<std::vector<std::int64_t>> naiveImage(const LinearFormSystem& s, std::int64_t n) {
  std::set<std::vector<std::int64_t>> out;
  const std::size_t d = s.variableCount();
  std::vector<std::int64_t> x(d, 0);
  for (;;) {
    std::vector<std::int64_t> y;
    for (const auto& f : s.forms()) {
      std::int64_t v = 0;
      for (std::size_t j = 0; j < d; ++j) v += f[j] * x[j];
      y.push_back(mod(v, n));
    }
    out.insert(y);
    std::size_t j = d;
    while (j-- > 0) {
      if (++x[j] < n) break;
      x[j] = 0;
      if (j == 0) return out;
    }
  }
}

std::vector<LinearFormSystem> sampleSystems() {
  return {systems::threeAP(),
          systems::fourAP(),
          LinearFormSystem({{1, 0}, {1, 2}}),
          LinearFormSystem({{1, 0}, {0, 1}, {1, 1}}),
          systems::xPlusYMinus3Z(),
          systems::dependentPair(2),
          LinearFormSystem({{2, 0}, {0, 3}, {1, 1}}),
          LinearFormSystem({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}})};
}

}  // namespace

TEST(Forms, ValidationRejectsBadInput) {
  EXPECT_THROW(LinearFormSystem({}), InputError);
  EXPECT_THROW(LinearFormSystem(Rows{{}}), InputError);
  EXPECT_THROW(LinearFormSystem({{1, 0}, {1}}), InputError);
  EXPECT_THROW(LinearFormSystem({{0, 0}}), InputError);
}

TEST(Forms, Size) {
  EXPECT_EQ(size(systems::threeAP()), 3);
  EXPECT_EQ(size(LinearFormSystem(Rows{{1}})), 1);
  EXPECT_EQ(size(LinearFormSystem({{1, 0}, {7, 1}})), 7);
}

TEST(Forms, PairwiseIndependence) {
  EXPECT_TRUE(pairwiseIndependent(systems::threeAP()));
  EXPECT_FALSE(pairwiseIndependent(systems::dependentPair(2)));
  EXPECT_FALSE(pairwiseIndependent(LinearFormSystem({{1, 1}, {2, 2}, {1, 0}})));
}

TEST(Forms, Invariance) {
  EXPECT_TRUE(isInvariant(systems::threeAP()));
  EXPECT_TRUE(isInvariant(LinearFormSystem({{1, 0}, {2, 1}})));
  EXPECT_FALSE(isInvariant(LinearFormSystem({{1, 0}, {0, 1}, {-1, -1}})));
  EXPECT_FALSE(isInvariant(systems::xPlusYMinus3Z()));
  EXPECT_FALSE(isInvariant(systems::dependentPair(2)));
}

TEST(Forms, DefaultDegree) {
  EXPECT_EQ(defaultDegree(systems::threeAP()), 1);
  EXPECT_EQ(defaultDegree(systems::fourAP()), 2);
  EXPECT_EQ(defaultDegree(LinearFormSystem({{1, 0}, {0, 1}})), 1);
  EXPECT_THROW(defaultDegree(systems::dependentPair(3)), InputError);
}

TEST(Forms, ClassifiersArePermutationInvariant) {
  for (const auto& s : sampleSystems()) {
    std::vector<std::size_t> order(s.formCount());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    auto p = s.permuted(order);
    EXPECT_EQ(size(p), size(s));
    EXPECT_EQ(pairwiseIndependent(p), pairwiseIndependent(s));
    EXPECT_EQ(isInvariant(p), isInvariant(s));
  }
}

TEST(Forms, KernelOfThreeAP) {
  auto kp = kernelize(systems::threeAP());
  EXPECT_EQ(kp.badModulus, 1);
  ASSERT_EQ(kp.rowCount(), 1u);
  // Any presentation must annihilate exactly the 3APs; compare against x - 2y + z.
  for (std::int64_t n : {5, 7, 9}) {
    auto ker = kernelSet(kp, n);
    std::set<std::vector<std::int64_t>> expected;
    for (std::int64_t x = 0; x < n; ++x)
      for (std::int64_t y = 0; y < n; ++y) expected.insert({x, y, mod(2 * y - x, n)});
    EXPECT_EQ(ker, expected);
  }
}

TEST(Forms, KernelWithTorsion) {
  auto kp = kernelize(LinearFormSystem({{1, 0}, {1, 2}}));
  EXPECT_EQ(kp.rowCount(), 0u);
  EXPECT_EQ(kp.badModulus, 2);
  auto kp2 = kernelize(LinearFormSystem({{1, 0}, {0, 1}, {1, 1}}));
  EXPECT_EQ(kp2.badModulus, 1);
  ASSERT_EQ(kp2.rowCount(), 1u);
  auto row = kp2.matrix[0];
  EXPECT_TRUE(row == std::vector<std::int64_t>({1, 1, -1}) || row == std::vector<std::int64_t>({-1, -1, 1}));
}

TEST(Forms, KernelEqualsImageForCoprimeModuli) {
  for (const auto& s : sampleSystems()) {
    auto kp = kernelize(s);
    for (std::int64_t n = 1; n <= 30; ++n) {
      if (std::gcd(n, kp.badModulus) != 1) continue;
      if (std::pow(double(n), double(s.formCount())) > 3e5) continue;
      auto img = imageModN(s, n);
      std::set<std::vector<std::int64_t>> imgSet(img.begin(), img.end());
      EXPECT_EQ(imgSet, naiveImage(s, n)) << s.name() << " N=" << n;
      EXPECT_EQ(imgSet, kernelSet(kp, n)) << s.name() << " N=" << n;
    }
  }
}

TEST(Forms, DuplicatedRowsKeepTheKernel) {
  auto base = systems::threeAP();
  auto dup = LinearFormSystem({{1, 0}, {1, 1}, {1, 2}, {1, 1}});
  auto kb = kernelize(base), kd = kernelize(dup);
  for (std::int64_t n : {5, 7, 11}) {
    std::set<std::vector<std::int64_t>> projected;
    for (const auto& y : kernelSet(kd, n)) projected.insert({y[0], y[1], y[2]});
    EXPECT_EQ(projected, kernelSet(kb, n));
    for (const auto& y : kernelSet(kd, n)) EXPECT_EQ(y[3], y[1]);
  }
}

TEST(Forms, ImageExamples) {
  EXPECT_EQ(imageModN(systems::threeAP(), 3).size(), 9u);
  auto single = imageModN(LinearFormSystem(Rows{{1}}), 5);
  EXPECT_EQ(single.size(), 5u);
  auto pair = imageModN(systems::dependentPair(2), 5);
  ASSERT_EQ(pair.size(), 5u);
  for (const auto& y : pair) EXPECT_EQ(y[1], mod(2 * y[0], 5));
  EXPECT_THROW(imageModN(systems::fourAP(), 2000, {.maxPoints = 1000}), BudgetExceeded);
}

TEST(Forms, JsonRoundTrip) {
  auto j = nlohmann::json::parse(R"({"name": "3AP", "forms": [[1,0],[1,1],[1,2]]})");
  auto s = LinearFormSystem::fromJson(j);
  EXPECT_EQ(s.name(), "3AP");
  EXPECT_EQ(s.forms(), systems::threeAP().forms());
  EXPECT_EQ(LinearFormSystem::fromJson(s.toJson()).forms(), s.forms());
  EXPECT_THROW(LinearFormSystem::fromJson(nlohmann::json::parse(R"({"forms": [[1,0],[1]]})")), InputError);
  EXPECT_THROW(LinearFormSystem::fromJson(nlohmann::json::parse(R"({"forms": [[1.5]]})")), InputError);
  auto fam = familyFromJson(nlohmann::json::parse(R"({"systems": [{"forms": [[1],[2]]}]})"));
  EXPECT_EQ(fam.size(), 1u);
}
