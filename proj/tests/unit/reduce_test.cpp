#include "beamsym/reduce.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace beamsym {
namespace {

using models::ModelKind;
using reduce::OrderGenerator;

const Expr t = Expr::independent("t");
const Expr x = Expr::independent("x");
const Expr s = Expr::independent("s");

// Replaces v, v_s, ... in an ODE by derivatives of a concrete function of s.
Expr apply_ode(const reduce::OdeModel& ode, const Expr& v) {
  return map_atoms(ode.equation, [&](const Expr& a) -> std::optional<Expr> {
    if (!(a.is_jet() && a.name() == ode.dependent)) return std::nullopt;
    Expr d = v;
    for (std::size_t i = 0; i < a.index().size(); ++i) d = partial(d, Expr::independent(ode.independent));
    return d;
  });
}

// E(u) for an explicit u(t, x).
Expr apply_pde(const jet::PdeModel& m, const Expr& u) {
  return map_atoms(m.equation, [&](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == m.dependent) return total_derivative_multi(u, a.index());
    return std::nullopt;
  });
}

TEST(Reduce, TravellingWaveEulerBernoulli) {
  const auto r = reduce::reproduce("eq7");
  EXPECT_TRUE(r.comparison.match);
  EXPECT_TRUE(r.reduction.generator_admitted);
  EXPECT_TRUE(r.reduction.ansatz_invariant);
  EXPECT_EQ(r.reduction.ode.order(), 4);
}

TEST(Reduce, TravellingWaveCoefficientsOfAllModels) {
  // Hand substitution of u = v(x - c t): u_tt = c^2 v'', u_xxtt = c^2 v'''', u_tttt = c^4 v''''.
  const Expr c = Expr::parameter("c");
  const char* expected[] = {
      "alpha*beta*v_ssss + c^2*v_ss",
      "(alpha*beta - beta*c^2)*v_ssss + c^2*v_ss",
      "(alpha*beta - beta*(1 + epsilon)*c^2 + epsilon*beta*c^4/alpha)*v_ssss + c^2*v_ss",
  };
  int i = 0;
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto red = reduce::apply_reduction(models::make_model(k), reduce::travelling_wave_rule(c));
    EXPECT_TRUE(reduce::compare_odes(red.ode.equation, reduce::parse_ode(expected[i++], "s", "v"), "v").match)
        << red.ode.pretty();
  }
}

TEST(Reduce, PrintedRayleighWaveDiffersUnlessAlphaBetaIsOne) {
  const auto r = reduce::reproduce("eq02j");
  ASSERT_FALSE(r.comparison.match);
  ASSERT_EQ(r.comparison.differences.size(), 1u);
  const Expr printed = substitute(reduce::parse_ode("(1 - beta*c^2)*v_ssss + c^2*v_ss", "s", "v"),
                                  Expr::parameter("alpha"), inverse(Expr::parameter("beta")));
  const Expr derived = substitute(r.reduction.ode.equation, Expr::parameter("alpha"), inverse(Expr::parameter("beta")));
  EXPECT_TRUE(reduce::compare_odes(derived, printed, "v").match);
}

TEST(Reduce, TimoshenkoWaveMatchesWithAlphaForA) {
  const auto r = reduce::reproduce("eq02m");
  EXPECT_FALSE(r.comparison.match);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes.back().find("matches"), std::string::npos);
}

TEST(Reduce, ScalingReductionsAndOrderReductions) {
  for (const char* label : {"eq02f", "eq02g", "eq02h", "eq02i"}) {
    const auto r = reduce::reproduce(label);
    EXPECT_TRUE(r.comparison.match) << label << ": " << r.reduction.ode.pretty();
  }
  EXPECT_EQ(reduce::reproduce("eq02g").reduction.ode.order(), 3);
  EXPECT_EQ(reduce::reproduce("eq02h").reduction.ode.order(), 2);
}

TEST(Reduce, FirstScalingReductionReportsDifferingTerm) {
  const auto r = reduce::reproduce("eq02e");
  EXPECT_TRUE(r.discrepancy_permitted);
  ASSERT_EQ(r.comparison.differences.size(), 1u);
  EXPECT_EQ(r.comparison.differences[0].monomial, Expr::jet("v", "ss"));
}

// E(u) / ODE(v) must not depend on the choice of v when u = M*v(s).
void expect_proportional(const jet::PdeModel& model, const reduce::ReductionRule& rule, const reduce::OdeModel& ode,
                         const Expr& v1, const Expr& v2) {
  auto lift = [&](const Expr& v) {
    const Expr vs = substitute(v, s, rule.similarity);
    return rule.form == reduce::AnsatzForm::Product ? rule.multiplier * vs : rule.multiplier + vs;
  };
  const Expr e1 = apply_pde(model, lift(v1)), e2 = apply_pde(model, lift(v2));
  const Expr o1 = apply_ode(ode, v1), o2 = apply_ode(ode, v2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.6, 1.8);
  for (int i = 0; i < 20; ++i) {
    Assignment at{{"t", d(rng)}, {"x", d(rng)}, {"alpha", 1.3}, {"beta", 0.7}, {"c", 0.9}, {"a", 0.8}, {"n", 3.0}};
    at["s"] = eval_numeric(rule.similarity, at);
    const double r1 = eval_numeric(e1, at) / eval_numeric(o1, at);
    const double r2 = eval_numeric(e2, at) / eval_numeric(o2, at);
    EXPECT_NEAR(r1, r2, 1e-9 * std::max(1.0, std::abs(r1)));
  }
}

TEST(Reduce, ScalingReductionSoundness) {
  const auto eb = models::make_model(ModelKind::EulerBernoulli);
  reduce::ReductionRule rule;
  rule.generator = jet::field({{"t", 2 * t}, {"x", x}}, {{"u", 2 * Expr::jet("u")}});
  rule.similarity = t * pow(x, Rational(-2));
  rule.multiplier = t;
  const auto red = reduce::apply_reduction(eb, rule);
  expect_proportional(eb, rule, red.ode, pow(s, Rational(3)) + s, exp(s) + pow(s, Rational(2)));
  rule.multiplier = x;
  rule.generator = jet::field({{"t", 2 * t}, {"x", x}}, {{"u", Expr::jet("u")}});
  expect_proportional(eb, rule, reduce::apply_reduction(eb, rule).ode, sin(s) + s, pow(s, Rational(4)));
}

TEST(Reduce, OrderReductionsPreserveSolutions) {
  const auto f = reduce::reproduce("eq02f").reduction.ode;
  const auto g = reduce::reproduce("eq02g").reduction.ode;
  const auto i = reduce::reproduce("eq02i").reduction.ode;
  // g = v' turns the third-order equation back into the fourth-order one.
  const Expr from_g = map_atoms(g.equation, [](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == "g") return Expr::jet("v", "s" + std::string(a.index().size(), 's'));
    if (a == Expr::independent("h")) return Expr::independent("s");
    return std::nullopt;
  });
  EXPECT_TRUE(reduce::compare_odes(from_g, f.equation, "v").match);
  // g = v'/v, multiplied by v.
  const Expr v = Expr::jet("v");
  Expr q = Expr::jet("v", "s") * inverse(v);
  std::vector<Expr> derivs{q};
  for (int k = 1; k < 4; ++k) derivs.push_back(expand(total_derivative(derivs.back(), "s")));
  const Expr from_i = map_atoms(i.equation, [&](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == "g") return derivs.at(a.index().size());
    if (a == Expr::independent("h")) return Expr::independent("s");
    return std::nullopt;
  });
  EXPECT_TRUE(reduce::compare_odes(expand(from_i * v), f.equation, "v").match);
}

TEST(Reduce, OrderReductionRejectsMissingSymmetry) {
  reduce::OdeModel ode;
  ode.name = "nonlinear";
  ode.equation = reduce::parse_ode("v_ss + v^2 = 0", "s", "v");
  EXPECT_FALSE(reduce::admits(ode, OrderGenerator::Shift));
  EXPECT_FALSE(reduce::admits(ode, OrderGenerator::Scale));
  EXPECT_THROW(reduce::order_reduce(ode, OrderGenerator::Scale, "h", "g"), reduce::ReductionError);
}

TEST(Reduce, ForcedPowerNeedsNegativeExponent) {
  const auto r = reduce::reproduce("forced-power");
  EXPECT_TRUE(r.reduction.ansatz_invariant);
  EXPECT_TRUE(r.comparison.match);
  ASSERT_GE(r.notes.size(), 2u);
  EXPECT_NE(r.notes[0].find("not invariant"), std::string::npos);
}

TEST(Reduce, ForcedExponentialDerivedForm) {
  // Hand derivation: u_tt = (2/a + 3 s v'/4 + s^2 v''/4)/t^2, u_xxxx = v''''/t^2, e^{au} = e^{av}/t^2.
  const auto r = reduce::reproduce("forced-exp");
  const Expr oracle = reduce::parse_ode("4*alpha*beta*v_ssss + s^2*v_ss + 3*s*v_s + 8/a - 4*exp(a*v)", "s", "v");
  EXPECT_TRUE(reduce::compare_odes(r.reduction.ode.equation, oracle, "v").match) << r.reduction.ode.pretty();
  EXPECT_FALSE(r.comparison.match);
}

TEST(Reduce, PrimeNotation) {
  reduce::OdeModel ode;
  ode.equation = reduce::parse_ode("v_ssss + s*v_s - v", "s", "v");
  EXPECT_EQ(ode.pretty(), "-v + v'''' + s*v' = 0");
}

TEST(TravellingWave, SymbolicResidualEulerBernoulli) {
  const Expr one(1);
  const auto w = reduce::travelling_wave_solution(ModelKind::EulerBernoulli, {}, Expr::parameter("c"),
                                                  {Expr::parameter("a0"), Expr::parameter("a1"), one, one});
  EXPECT_TRUE(w.residual.is_zero()) << to_string(w.residual);
}

TEST(TravellingWave, EulerBernoulliUnitParameters) {
  models::ModelParams p{Expr(1), Expr(1), Expr(0)};
  const auto w = reduce::travelling_wave_solution(ModelKind::EulerBernoulli, p, Expr(1), {0, 0, 1, 0});
  EXPECT_EQ(w.solution, sin(x - t));
  EXPECT_TRUE(w.residual.is_zero());
}

TEST(TravellingWave, ConstantsSolveEveryModel) {
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto w = reduce::travelling_wave_solution(k, {}, Expr::parameter("c"), {1, 0, 0, 0});
    EXPECT_EQ(w.solution, Expr(1));
    EXPECT_TRUE(w.residual.is_zero());
  }
}

TEST(TravellingWave, RayleighWavenumber) {
  // E(sin(k(x - ct))) = k^2 (k^2 (alpha*beta - beta*c^2) - c^2) sin; alpha = 2, beta = 1/2, c = 1 gives k^2 = 2.
  models::ModelParams p{Expr(2), Expr(Rational(1, 2)), Expr(0)};
  const auto w = reduce::travelling_wave_solution(ModelKind::Rayleigh, p, Expr(1), {0, 0, 1, 1});
  EXPECT_EQ(w.k_squared, Expr(2));
  EXPECT_TRUE(w.residual.is_zero());
}

TEST(TravellingWave, DegenerateRayleighRaises) {
  models::ModelParams p{Expr(1), Expr(1), Expr(0)};
  EXPECT_THROW(reduce::travelling_wave_solution(ModelKind::Rayleigh, p, Expr(1), {0, 0, 1, 0}), reduce::RegimeError);
  models::ModelParams q{Expr(1), Expr(1), Expr(0)};
  EXPECT_THROW(reduce::travelling_wave_solution(ModelKind::Rayleigh, q, Expr(2), {0, 0, 1, 0}), reduce::RegimeError);
}

TEST(TravellingWave, NumericResidualOnAllModels) {
  models::ModelParams p{Expr(3), Expr(Rational(1, 2)), Expr(Rational(1, 5))};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-5, 5);
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto w = reduce::travelling_wave_solution(k, p, Expr(1), {Expr(Rational(1, 3)), Expr(2), Expr(1), Expr(-1)});
    for (int i = 0; i < 200; ++i) {
      const double r = eval_numeric(w.raw_residual, {{"t", d(rng)}, {"x", d(rng)}});
      EXPECT_LT(std::abs(r), 1e-9);
    }
  }
}

TEST(ForcedOde, ConstantSourceQuadratic) {
  const auto f = reduce::constant_source_solution(Expr(1), Expr(2), {0, 0, 0, 0});
  EXPECT_EQ(f.solution, pow(s, Rational(2)));
  EXPECT_TRUE(f.residual.is_zero());
}

TEST(ForcedOde, ConstantSourceSymbolic) {
  const Expr c = Expr::parameter("c");
  const auto f = reduce::constant_source_solution(c, Expr::parameter("a0"), {1, 2, 3, 4});
  EXPECT_TRUE(f.residual.is_zero());
  const auto h = reduce::constant_source_solution(c, Expr(0), {1, 0, 0, 0});
  EXPECT_EQ(h.solution, sin(c * s));
}

TEST(ForcedOde, AffineSourceResidual) {
  const auto f = reduce::affine_source_solution(Expr::parameter("c"), Expr::parameter("a1"), Expr::parameter("a0"),
                                                {1, 1, 1, 1});
  EXPECT_TRUE(f.residual.is_zero()) << to_string(f.residual);
  const auto g = reduce::affine_source_solution(Expr(1), Expr(2), Expr(3), {1, -1, 2, 5});
  EXPECT_TRUE(g.residual.is_zero());
  // mu^2 + c^2 mu - a1 with c = 1, a1 = 2 has roots 1 and -2.
  EXPECT_EQ(pow(g.exponents[0], Rational(2)), Expr(1));
  EXPECT_EQ(pow(g.exponents[2], Rational(2)), Expr(-2));
}

TEST(ForcedOde, AffineDegenerateExponents) {
  EXPECT_THROW(reduce::affine_source_solution(Expr(1), Expr(Rational(-1, 4)), Expr(0), {1, 1, 1, 1}),
               reduce::RegimeError);
}

}  // namespace
}  // namespace beamsym
