#include "beamsym/painleve.hpp"

#include <gtest/gtest.h>

#include <random>

namespace beamsym {
namespace {

using painleve::SeriesClass;

const Expr x0 = Expr::parameter("x0");
const Expr nu = Expr::parameter("nu");

painleve::PolynomialOde poly(const std::string& text) {
  reduce::OdeModel ode;
  ode.independent = "x";
  ode.dependent = "y";
  ode.equation = reduce::parse_ode(text, "x", "y");
  return painleve::to_polynomial(ode);
}

std::vector<Rational> Q(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (long k : v) out.emplace_back(k);
  return out;
}

Expr P(const std::string& text) {
  SymbolTable st;
  st.parameters = {"nu", "x0", "F0", "F1"};
  return parse(text, st);
}

TEST(RationalRoots, FactorsAndRemainder) {
  // (2s - 1)(s + 3)(s^2 + 1) = 2s^4 + 5s^3 - s^2 + 5s - 3
  const auto r = painleve::rational_roots(Q({-3, 5, -1, 5, 2}));
  EXPECT_EQ(r.roots, (std::vector<Rational>{Rational(-3), Rational(1, 2)}));
  ASSERT_EQ(r.remainder.size(), 3u);
  EXPECT_EQ(r.remainder[1], Rational(0));
  const auto m = painleve::rational_roots(Q({0, 0, 1, -2, 1}));
  EXPECT_EQ(m.roots, Q({0, 0, 1, 1}));
  EXPECT_TRUE(m.complete());
}

TEST(Classify, SignPatterns) {
  EXPECT_EQ(painleve::classify_series(Q({-1, 1, 2})), SeriesClass::Right);
  EXPECT_EQ(painleve::classify_series(Q({-3, -2, -1})), SeriesClass::Left);
  EXPECT_EQ(painleve::classify_series(Q({-2, -1, 1})), SeriesClass::Mixed);
  EXPECT_THROW(painleve::classify_series(Q({-1, -1, 2})), painleve::PainleveError);
  EXPECT_THROW(painleve::classify_series(Q({1, 2})), painleve::PainleveError);
}

TEST(Balance, SimplePole) {
  const auto ode = poly("y_x = y^2");
  const auto b = painleve::dominant_balance(ode);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].p, Rational(-1));
  EXPECT_EQ(b[0].retained, Q({-1}));
  const auto s = painleve::build_series(ode, Rational(-1), Rational(-1), 5);
  EXPECT_EQ(s.series.coefficients[0], Expr(-1));
  for (std::size_t k = 1; k < s.series.coefficients.size(); ++k) EXPECT_TRUE(s.series.coefficients[k].is_zero());
  EXPECT_EQ(s.consistent_through, 5);
}

TEST(Balance, FractionalExponentIsWeak) {
  const auto ode = poly("y_x = y^3");
  const auto b = painleve::dominant_balance(ode);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].p, Rational(-1, 2));
  const auto r = painleve::painleve_test(ode);
  EXPECT_NE(r.verdict.find("fails strong test"), std::string::npos);
}

TEST(Balance, NoPoleIsInconclusive) {
  const auto r = painleve::painleve_test(poly("y_xx + x*y"));
  EXPECT_TRUE(r.balances.empty());
  EXPECT_NE(r.verdict.find("inconclusive"), std::string::npos);
}

// y'' = 6y^2 + x passes; y'' = 6y^2 + x^2 violates the compatibility condition at r = 6.
TEST(Series, FirstPainleveAndPerturbation) {
  const auto pass = painleve::painleve_test(poly("y_xx = 6*y^2 + x"));
  EXPECT_EQ(pass.verdict, "passes");
  ASSERT_EQ(pass.branches.size(), 1u);
  EXPECT_EQ(pass.branches[0].resonances, Q({-1, 6}));
  const auto fail = painleve::painleve_test(poly("y_xx = 6*y^2 + x^2"));
  EXPECT_EQ(fail.verdict, "fails Painleve test at resonance 6");
}

TEST(ThirdOrder, LeadingOrder) {
  const auto ode = painleve::to_polynomial(painleve::registry_ode("eq02i"));
  EXPECT_EQ(ode.order, 3);
  const auto b = painleve::dominant_balance(ode);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].p, Rational(-1));
  const Expr a = Expr::parameter("a");
  const Expr expect = expand((a - 3) * (a - 2) * (a - 1) * a);
  EXPECT_TRUE(is_zero(b[0].polynomial * inverse(b[0].content) - expect)) << to_string(b[0].polynomial);
  EXPECT_EQ(b[0].roots.roots, Q({0, 1, 2, 3}));
  EXPECT_EQ(b[0].retained, Q({1, 2, 3}));
}

TEST(ThirdOrder, ResonanceFactorization) {
  const auto ode = painleve::to_polynomial(painleve::registry_ode("eq02i"));
  const Expr s = Expr::parameter("s");
  for (long av : {1, 2, 3}) {
    const Rational a(av);
    const auto r = painleve::resonances(ode, Rational(-1), a);
    // 16 nu (2a - 3 + s)(2 - 6a + 2a^2 - 3s + 2as + s^2) x0^4
    const Expr expect = expand(16 * nu * pow(x0, 4) * (Expr(2 * a - 3) + s) *
                               (Expr(2 - 6 * a + 2 * a * a) + Expr(2 * a - 3) * s + pow(s, 2)));
    EXPECT_TRUE(is_zero(r.polynomial - expect)) << av << ": " << to_string(r.polynomial);
  }
  EXPECT_EQ(painleve::resonances(ode, Rational(-1), Rational(1)).roots.roots, Q({-1, 1, 2}));
  EXPECT_EQ(painleve::resonances(ode, Rational(-1), Rational(2)).roots.roots, Q({-2, -1, 1}));
  EXPECT_EQ(painleve::resonances(ode, Rational(-1), Rational(3)).roots.roots, Q({-3, -2, -1}));
}

TEST(ThirdOrder, ResonancesIndependentOfParameters) {
  const auto base = painleve::registry_ode("eq02i");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(1, 40);
  for (int i = 0; i < 3; ++i) {
    reduce::OdeModel ode = base;
    ode.equation = substitute(base.equation, nu, Expr(Rational(d(rng), d(rng))));
    auto p = painleve::to_polynomial(ode);
    p.expansion_point = Expr(Rational(d(rng), d(rng)));
    for (long a : {1, 2, 3}) {
      const auto sym = painleve::resonances(painleve::to_polynomial(base), Rational(-1), Rational(a)).roots.roots;
      EXPECT_EQ(painleve::resonances(p, Rational(-1), Rational(a)).roots.roots, sym);
    }
  }
}

TEST(ThirdOrder, RightSeriesConsistent) {
  const auto r = painleve::painleve_test(painleve::registry_ode("eq02i"), 8);
  EXPECT_EQ(r.verdict, "passes");
  ASSERT_EQ(r.branches.size(), 3u);
  EXPECT_EQ(r.branches[0].series_class, SeriesClass::Right);
  EXPECT_EQ(r.branches[1].series_class, SeriesClass::Mixed);
  EXPECT_EQ(r.branches[1].status, "constructed but not consistency-checked");
  EXPECT_EQ(r.branches[2].series_class, SeriesClass::Left);
  const auto& s = *r.branches[0].series;
  EXPECT_EQ(s.consistent_through, 8);
  for (const auto& res : s.residuals) EXPECT_TRUE(is_zero(res));
  EXPECT_EQ(s.resonance_orders, (std::vector<int>{1, 2}));
  // x0 together with the constants at the two positive resonances.
  EXPECT_EQ(s.series.free_constants.size() + 1, 3u);
}

TEST(ThirdOrder, PrintedSeriesCoefficients) {
  const auto ode = painleve::to_polynomial(painleve::registry_ode("eq02i"));
  const auto s = painleve::build_series(ode, Rational(-1), Rational(1), 8);
  const Expr f2 = P("(-F0 - 12*nu*x0 - 156*F0*nu*x0^2 - 168*F0^2*nu*x0^3 - 168*F1*nu*x0^3 - 32*F0^3*nu*x0^4 -"
                    " 96*F0*F1*nu*x0^4) / (64*nu*x0^4)");
  const Expr f3 = P("(22*F0 + 7*F0^2*x0 - 3*F1*x0 + 240*nu*x0 + 2880*F0*nu*x0^2 + 3780*F0^2*nu*x0^3 +"
                    " 2220*F1*nu*x0^3 + 1680*F0^3*nu*x0^4 + 1680*F0*F1*nu*x0^4 + 240*F0^4*nu*x0^5 +"
                    " 480*F0^2*F1*nu*x0^5 - 240*F1^2*nu*x0^5) / (480*nu*x0^5)");
  EXPECT_EQ(equivalent(s.series.coefficients[3], f2), Equivalence::Equal);
  EXPECT_EQ(equivalent(s.series.coefficients[4], f3), Equivalence::Equal);
}

TEST(ThirdOrder, TabulatedCoefficientCheck) {
  const auto checks = painleve::check_tabulated_coefficients();
  ASSERT_EQ(checks.size(), 2u);
  for (const auto& c : checks) {
    EXPECT_EQ(c.equivalence, Equivalence::Equal) << c.name;
    EXPECT_TRUE(c.difference.is_zero()) << c.name << ": " << to_string(c.difference);
  }
}

// Independent check: substitute the truncated series into the ODE written in z = x - x0.
TEST(ThirdOrder, DirectSubstitutionOracle) {
  const auto ode = painleve::registry_ode("eq02i");
  const auto s = painleve::build_series(painleve::to_polynomial(ode), Rational(-1), Rational(1), 6);
  const Expr z = Expr::independent("x");  // differentiate in z; d/dz = d/dx
  const Expr y = s.series.to_expr(z);
  const Expr in_z = map_atoms(ode.equation, [&](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == "y") {
      Expr d = y;
      for (std::size_t k = 0; k < a.index().size(); ++k) d = partial(d, z);
      return d;
    }
    if (a == Expr::independent("x")) return Expr::parameter("zx") ;
    return std::nullopt;
  });
  const Expr shifted = expand(substitute(in_z, Expr::parameter("zx"), z + x0) * pow(z, 4));
  // Residual is O(z^6) after multiplying by z^4: lowest retained orders vanish.
  for (const auto& term : terms_of(shifted)) {
    Rational k(0);
    for (const auto& [base, q] : factors_of(term))
      if (base == z) k = q;
    EXPECT_GE(k, Rational(7)) << to_string(term);
  }
}

TEST(SecondOrder, TwoBranchesPass) {
  const auto r = painleve::painleve_test(painleve::registry_ode("eq02h"), 8);
  ASSERT_EQ(r.balances.size(), 1u);
  EXPECT_EQ(r.balances[0].retained, Q({1, 2}));
  EXPECT_EQ(r.branches[0].resonances, Q({-1, 1}));
  EXPECT_EQ(r.branches[1].resonances, Q({-2, -1}));
  EXPECT_EQ(r.verdict, "passes");
}

TEST(Registry, JsonShape) {
  const auto j = painleve::painleve_test(painleve::registry_ode("eq02i"), 4).to_json();
  EXPECT_NE(j.find("\"verdict\": \"passes\""), std::string::npos);
  EXPECT_NE(j.find("\"consistent_through\": 4"), std::string::npos);
  EXPECT_THROW(painleve::registry_ode("nope"), painleve::PainleveError);
}

}  // namespace
}  // namespace beamsym
