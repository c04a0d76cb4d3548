#include <gtest/gtest.h>

#include "addcomb/harness.hpp"

using namespace addcomb;

TEST(Harness, ScanExactThreeAp) {
  auto rows = scanConvergence(systems::threeAP(), Quantity::m, Rational(2, 5), {13, 5, 11, 7});
  ASSERT_EQ(rows.size(), 4u);
  std::vector<std::int64_t> ns;
  for (const auto& r : rows) {
    ns.push_back(r.n);
    EXPECT_FALSE(r.skipped);
    EXPECT_EQ(*r.exactValue, reference::minSol(systems::threeAP(), detail::ceilTimes(Rational(2, 5), r.n), r.n));
    EXPECT_EQ(solBrute(r.certificate, systems::threeAP()).exact(), *r.exactValue);
    EXPECT_TRUE(r.isPrime);
  }
  EXPECT_EQ(ns, (std::vector<std::int64_t>{5, 7, 11, 13}));
  EXPECT_EQ(rows[0].exactValue, Rational(2, 25));
}

TEST(Harness, EmptyScanHasHeaderOnly) {
  auto rows = scanConvergence(systems::threeAP(), Quantity::m, Rational(2, 5), {});
  EXPECT_TRUE(rows.empty());
  EXPECT_EQ(scanCsv(rows), "N,isPrime,p1,quantity,value,method,seed,elapsedMs\n");
}

TEST(Harness, DependentPairScan) {
  std::vector<std::int64_t> moduli{5, 7, 11, 13, 101, 1009, 10007};
  auto rows = scanConvergence(systems::dependentPair(2), Quantity::d, 0, moduli);
  for (const auto& r : rows) {
    auto ord = static_cast<std::int64_t>(multiplicativeOrder(2, static_cast<std::uint64_t>(r.n)));
    EXPECT_EQ(*r.exactValue, Rational((r.n - 1) / ord * (ord / 2), r.n));
    EXPECT_EQ(r.method, "exact-cycles");
    if (r.n <= 13) EXPECT_EQ(*r.exactValue, reference::maxFree({systems::dependentPair(2)}, r.n));
  }
  EXPECT_NEAR(*rows.back().value, 0.5, 0.01);
}

TEST(Harness, CompositeModuliAndSkips) {
  ScanOptions opt;
  opt.perModulus.maxNodes = 200;
  auto rows = scanConvergence(systems::threeAP(), Quantity::m, Rational(1, 2), {9, 15, 21}, opt);
  EXPECT_EQ(rows[0].p1, 3);
  EXPECT_FALSE(rows[0].isPrime);
  EXPECT_TRUE(rows[2].skipped);
  EXPECT_EQ(rows[2].method, "skipped");
  auto csv = scanCsv(rows);
  EXPECT_NE(csv.find("21,false,3,m,,skipped"), std::string::npos);
}

TEST(Harness, ScanIsDeterministic) {
  ScanOptions opt;
  opt.mode = SolveMode::heuristic;
  opt.seed = 11;
  opt.annealing.iterations = 4'000;
  opt.annealing.epochLength = 1'000;
  auto a = scanConvergence(systems::threeAP(), Quantity::m, Rational(2, 5), {31, 37, 41, 45}, opt);
  opt.threads = 1;
  auto b = scanConvergence(systems::threeAP(), Quantity::m, Rational(2, 5), {31, 37, 41, 45}, opt);
  EXPECT_EQ(scanCsv(a, false), scanCsv(b, false));
}

TEST(Harness, SvgDistinguishesPrimes) {
  auto rows = scanConvergence(systems::threeAP(), Quantity::M, Rational(2, 5), {5, 6, 7, 9});
  auto svg = scanSvg(rows, "M & friends");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("<rect x="), std::string::npos);
  EXPECT_NE(svg.find("M &amp; friends"), std::string::npos);
  EXPECT_NE(svg.find("(composite, p1=2)"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Harness, ReproduceKnownAndUnknownIds) {
  auto r = reproduce("kernelize-roundtrip");
  EXPECT_TRUE(r.pass) << r.details.dump();
  EXPECT_EQ(r.criterion, 11);
  auto w = reproduce("weyl-1009");
  EXPECT_TRUE(w.pass) << w.details.dump();
  try {
    reproduce("no-such-id");
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("weyl-1009"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gvn-3ap"), std::string::npos);
  }
}
