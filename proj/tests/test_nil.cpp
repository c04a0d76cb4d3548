#include <gtest/gtest.h>

#include "addcomb/nil.hpp"

using namespace addcomb;

namespace {

std::vector<Rational> q(std::initializer_list<Rational> xs) { return std::vector<Rational>(xs); }

std::vector<ModelPtr> allModels() {
  return {models::heisenbergLcs(), models::heisenbergDeg3(), models::torus(2, 2), models::torus(1, 1),
          models::torus(3, 2)};
}

UnitriangularElement randomUnitriangular(std::size_t kappa, Rng& rng) {
  RationalMatrix m = RationalMatrix::identity(kappa);
  for (std::size_t i = 0; i < kappa; ++i)
    for (std::size_t j = i + 1; j < kappa; ++j)
      m(i, j) = Rational(static_cast<std::int64_t>(rng.below(41)) - 20, static_cast<std::int64_t>(rng.below(9)) + 1);
  return UnitriangularElement(m);
}

}  // namespace

TEST(Nil, LogExpRoundTrip) {
  EXPECT_TRUE(logOf(UnitriangularElement::identity(4)).isZero());
  auto h = expOf(Rational(5, 3) * models::elementary(3, 0, 1));
  EXPECT_EQ(logOf(h), Rational(5, 3) * models::elementary(3, 0, 1));
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = randomUnitriangular(4, rng);
    EXPECT_EQ(expOf(logOf(g)), g);
    auto x = logOf(g);
    EXPECT_EQ(logOf(expOf(x)), x);
    EXPECT_TRUE((g * g.inverse()).isIdentity());
  }
  EXPECT_THROW(expOf(RationalMatrix::identity(3)), InputError);
}

TEST(Nil, ModelValidation) {
  // span(X_2, X_3) with X_2 = e12, X_3 = e23 is not an ideal once X_1 = e13 comes first.
  using models::elementary;
  EXPECT_THROW(FilteredNilmanifoldModel("bad", 3, {elementary(3, 0, 2), elementary(3, 0, 1), elementary(3, 1, 2)},
                                        {3, 3, 1}),
               InputError);
  // [G_1, G_1] must sit inside G_2.
  EXPECT_THROW(FilteredNilmanifoldModel("bad", 3, {elementary(3, 0, 1), elementary(3, 1, 2), elementary(3, 0, 2)},
                                        {3, 3}),
               InputError);
  EXPECT_THROW(FilteredNilmanifoldModel("bad", 3, {elementary(3, 0, 1), elementary(3, 0, 1)}, {2, 2}), InputError);
  EXPECT_THROW(models::byName("no-such-model"), InputError);
  EXPECT_EQ(models::byName("torus:m=2,s=3")->levelDims(), (std::vector<std::size_t>{2, 2, 1, 1}));
}

TEST(Nil, ModelJsonRoundTrip) {
  auto m = models::heisenbergDeg3();
  auto back = FilteredNilmanifoldModel::fromJson(m->toJson());
  EXPECT_EQ(back.levelDims(), m->levelDims());
  EXPECT_EQ(back.basis(), m->basis());
  auto j = nlohmann::json::parse(R"({"dimension": 2, "basis": [[["0","1/2"],["0","0"]]], "levelDims": [1,1], "degree": 1})");
  auto half = FilteredNilmanifoldModel::fromJson(j);
  EXPECT_EQ(half.dim(), 1u);
}

TEST(Nil, MalcevCoordinates) {
  auto h = models::heisenbergLcs();
  EXPECT_EQ(h->malcev(UnitriangularElement::identity(3)), q({0, 0, 0}));
  auto g = h->element(q({Rational(2, 3), Rational(-5, 7), Rational(1, 4)}));
  EXPECT_EQ(h->malcev(g), q({Rational(2, 3), Rational(-5, 7), Rational(1, 4)}));
  EXPECT_EQ(h->malcev(h->element(q({3, -2, 7}))), q({3, -2, 7}));
  EXPECT_TRUE(h->inGamma(h->element(q({3, -2, 7}))));
  Rng rng(2);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 100; ++trial) {
      auto x = randomLevelElement(*model, 0, rng);
      EXPECT_EQ(model->element(model->malcev(x)), x);
    }
  auto t = models::torus(2, 1);
  EXPECT_THROW(t->malcev(randomUnitriangular(3, rng)), InputError);
}

TEST(Nil, FractionalAndIntegerParts) {
  auto h = models::heisenbergLcs();
  auto g = h->element(q({Rational(3, 2), Rational(-1, 4), Rational(7, 3)}));
  auto [frac, integral] = fracIntParts(*h, g);
  EXPECT_EQ(frac * integral, g);
  EXPECT_TRUE(h->inGamma(integral));
  for (const auto& c : h->malcev(frac)) {
    EXPECT_GE(c, 0);
    EXPECT_LT(c, 1);
  }
  auto gamma = h->element(q({4, -1, 2}));
  auto [f2, i2] = fracIntParts(*h, gamma);
  EXPECT_TRUE(f2.isIdentity());
  EXPECT_EQ(i2, gamma);
  auto small = h->element(q({Rational(1, 2), Rational(1, 3), 0}));
  EXPECT_TRUE(fracIntParts(*h, small).second.isIdentity());
  Rng rng(3);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 30; ++trial) {
      auto x = randomLevelElement(*model, 0, rng);
      auto [fx, ix] = fracIntParts(*model, x);
      EXPECT_EQ(fx * ix, x);
      EXPECT_TRUE(model->inGamma(ix));
    }
}

TEST(Nil, TaylorEvaluation) {
  auto h = models::heisenbergLcs();
  auto id = UnitriangularElement::identity(3);
  auto g1 = h->element(q({1, 0, 0})), g2 = h->element(q({0, 0, 1}));
  PolynomialSequence p(h, {id, g1, g2});
  EXPECT_EQ(p(0), id);
  EXPECT_EQ(p(2), h->element(q({2, 0, 0})) * g2);
  EXPECT_TRUE(PolynomialSequence::identity(h)(Integer(-17)).isIdentity());
  // Negative arguments use exact inverse powers: g(-1) = g_1^-1 g_2^C(-1,2) = g_1^-1 g_2.
  EXPECT_EQ(p(-1), g1.inverse() * g2);
  EXPECT_THROW(PolynomialSequence(h, {id, id, g1}), InputError);
}

TEST(Nil, TaylorExpansionExamples) {
  auto h = models::heisenbergLcs();
  auto c = h->element(q({Rational(1, 5), 2, Rational(-3, 7)}));
  auto constant = taylorExpand(h, {c, c, c});
  EXPECT_EQ(constant.coefficient(0), c);
  EXPECT_TRUE(constant.coefficient(1).isIdentity());
  EXPECT_TRUE(constant.coefficient(2).isIdentity());

  auto line = models::torus(1, 2);
  Rational a(2, 7), b(-3, 11);
  auto at = [&](Rational x) { return line->element(q({x})); };
  auto p = taylorExpand(line, {at(0), at(a), at(2 * a + b)});
  EXPECT_EQ(line->malcev(p.coefficient(0)), q({0}));
  EXPECT_EQ(line->malcev(p.coefficient(1)), q({a}));
  EXPECT_EQ(line->malcev(p.coefficient(2)), q({b}));
}

TEST(Nil, TaylorRejectsNonPolynomials) {
  auto h = models::heisenbergLcs();
  // A quadratic horizontal motion is not a polynomial for the lower central series.
  auto v = [&](Rational x) { return h->element(q({x, 0, 0})); };
  EXPECT_THROW(taylorExpand(h, {v(0), v(1), v(4)}), InputError);
  EXPECT_THROW(taylorExpand(h, {v(0), v(1), v(2), v(4)}), InputError);
}

TEST(Nil, ExpandEvalRoundTrip) {
  Rng rng(4);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 100; ++trial) {
      auto p = randomPolynomial(model, rng);
      auto back = taylorExpand(model, sampleValues(p, model->degree() + 1));
      EXPECT_EQ(back.coefficients(), p.coefficients());
      for (std::int64_t n : {-5, 7, 12}) EXPECT_EQ(back(n), p(n));
    }
}

TEST(Nil, GroupLaw) {
  Rng rng(5);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 20; ++trial) {
      auto a = randomPolynomial(model, rng), b = randomPolynomial(model, rng);
      auto ab = pointwiseProduct(a, b);
      for (std::int64_t n = -3; n <= 6; ++n) EXPECT_EQ(ab(n), a(n) * b(n));
      auto back = taylorExpand(model, {a(0).inverse(), a(1).inverse(), a(2).inverse()});
      EXPECT_NO_THROW(back);
    }
}

TEST(Nil, CharacterEnumeration) {
  auto h = models::heisenbergLcs();
  EXPECT_TRUE(enumerateCharacters(*h, 2, 5).empty());
  auto level1 = enumerateCharacters(*h, 1, 1);
  ASSERT_EQ(level1.size(), 4u);
  EXPECT_EQ(level1[0].k, (std::vector<std::int64_t>{1, 0}));
  for (const auto& xi : level1) EXPECT_EQ(xi.complexity(), 1);
  auto line = models::torus(1, 1);
  auto ks = enumerateCharacters(*line, 1, 2);
  std::vector<std::vector<std::int64_t>> got;
  for (const auto& xi : ks) got.push_back(xi.k);
  EXPECT_EQ(got, (std::vector<std::vector<std::int64_t>>{{1}, {-1}, {2}, {-2}}));
  // Degree-3 Heisenberg: nothing at level 2, the centre at level 3.
  auto h3 = models::heisenbergDeg3();
  EXPECT_TRUE(enumerateCharacters(*h3, 2, 3).empty());
  EXPECT_EQ(enumerateCharacters(*h3, 3, 3).size(), 6u);
  EXPECT_EQ(enumerateCharacters(*h, 1, 3).size(), 24u);
}

TEST(Nil, IrrationalityExamples) {
  auto h = models::heisenbergLcs();
  auto id = UnitriangularElement::identity(3);
  PolynomialSequence lattice(h, {id, h->element(q({2, -1, 5})), h->element(q({0, 0, 3}))});
  auto rep = isIrrational(lattice, 1);
  EXPECT_FALSE(rep.irrational);
  ASSERT_TRUE(rep.witness);
  EXPECT_EQ(rep.witness->k, (std::vector<std::int64_t>{1, 0}));

  const std::int64_t qq = 11, t = 4, a = 3;
  PolynomialSequence irr(h, {id, h->element(q({Rational(1, qq), Rational(t, qq), 0}))});
  EXPECT_TRUE(isIrrational(irr, a).irrational);
  // Brute-force cross-check over every k with |k|_1 <= A.
  for (std::int64_t k1 = -a; k1 <= a; ++k1)
    for (std::int64_t k2 = -a; k2 <= a; ++k2) {
      if ((k1 == 0 && k2 == 0) || std::abs(k1) + std::abs(k2) > a) continue;
      EXPECT_NE((k1 + k2 * t) % qq, 0);
    }

  auto line = models::torus(1, 1);
  PolynomialSequence half(line, {UnitriangularElement::identity(2), line->element(q({Rational(1, 2)}))});
  auto hr = isIrrational(half, 2);
  EXPECT_FALSE(hr.irrational);
  EXPECT_EQ(hr.witness->k, (std::vector<std::int64_t>{2}));
}

TEST(Nil, FactorCoefficientExamples) {
  auto line = models::torus(1, 1);
  auto three = line->element(q({3}));
  auto f = factorCoefficient(*line, 1, three, 2, 5);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->t, (std::vector<Integer>{3}));
  EXPECT_TRUE(f->gPrime.isIdentity());

  auto h = models::heisenbergLcs();
  const std::int64_t qq = 227;
  auto g1 = h->element(q({2, Rational(1, qq), Rational(5, 9)}));
  auto fh = factorCoefficient(*h, 1, g1, 3, qq);
  ASSERT_TRUE(fh);
  EXPECT_EQ(fh->character.k, (std::vector<std::int64_t>{1, 0}));
  EXPECT_EQ(h->levelCoords(fh->gamma, 1), q({2, 0}));
  EXPECT_EQ(h->levelCoords(fh->gPrime, 1)[0], 0);
  EXPECT_EQ(fh->gPrime * fh->gamma, g1);

  auto irr = h->element(q({Rational(1, qq), Rational(5, qq), 0}));
  EXPECT_FALSE(factorCoefficient(*h, 1, irr, 3, qq));
  EXPECT_THROW(factorCoefficient(*h, 1, irr, 3, 6), InputError);
  // hcf(k) = 2 cannot divide an odd value.
  EXPECT_THROW(factorCoefficient(*h, h->element(q({Rational(1, 2), 0, 0})), LevelCharacter{1, {2, 0}}), InputError);
}

TEST(Nil, ScalingLemma) {
  Rng rng(6);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 25; ++trial) {
      auto p = randomPolynomial(model, rng);
      std::int64_t qq = static_cast<std::int64_t>(rng.below(6)) + 2;
      auto h = dilate(p, qq);
      Integer qi = 1;
      for (int i = 1; i <= model->degree(); ++i) {
        qi *= qq;
        auto ratio = h.coefficient(i) * power(p.coefficient(i), Rational(qi)).inverse();
        EXPECT_TRUE(model->inTriangledown(ratio, i)) << model->name() << " level " << i;
      }
    }
}

TEST(Nil, NewtonLemma) {
  Rng rng(7);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 25; ++trial) {
      // g(n) = gamma(n/q) for a Gamma-valued gamma, so g(qZ) lies in Gamma.
      std::vector<UnitriangularElement> gammaCoeffs;
      for (int j = 0; j <= model->degree(); ++j) gammaCoeffs.push_back(randomLevelElement(*model, j, rng, 1));
      PolynomialSequence gamma(model, gammaCoeffs);
      std::int64_t qq = static_cast<std::int64_t>(rng.below(5)) + 2;
      std::vector<UnitriangularElement> values;
      for (int n = 0; n <= model->degree(); ++n) {
        UnitriangularElement v = gamma.coefficient(0);
        for (int j = 1; j <= model->degree(); ++j) {
          Rational e = 1;
          for (int a = 0; a < j; ++a) e *= Rational(n, qq) - a;
          for (int a = 1; a <= j; ++a) e /= a;
          v = v * power(gamma.coefficient(j), e);
        }
        values.push_back(v);
      }
      auto g = taylorExpand(model, values);
      for (std::int64_t n = -3; n <= 3; ++n) ASSERT_TRUE(model->inGamma(g(Integer(qq) * n)));
      Integer qi = 1;
      for (int i = 1; i <= model->degree(); ++i) {
        qi *= qq;
        EXPECT_TRUE(integralModTriangledown(*model, i, power(g.coefficient(i), Rational(qi))))
            << model->name() << " level " << i;
      }
    }
}

TEST(Nil, ShiftedTaylor) {
  Rng rng(8);
  for (const auto& model : allModels())
    for (int trial = 0; trial < 25; ++trial) {
      auto g = randomPolynomial(model, rng);
      std::int64_t qq = static_cast<std::int64_t>(rng.below(20)) + 1;
      std::vector<UnitriangularElement> values;
      for (int n = 0; n <= model->degree(); ++n) values.push_back(g(Integer(n + qq)).inverse() * g(Integer(n)));
      auto h = taylorExpand(model, values, 1);
      for (int i = 0; i <= model->degree(); ++i) EXPECT_TRUE(model->inLevel(h.coefficient(i), i + 1));
    }
}
