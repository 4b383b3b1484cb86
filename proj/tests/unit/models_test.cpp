#include "beamsym/jet.hpp"
#include "beamsym/models.hpp"
#include "beamsym/parse.hpp"

#include <gtest/gtest.h>

namespace beamsym {
namespace {

using models::ModelKind;
using models::SourceKind;
using models::SourceSpec;

Expr P(const std::string& s) {
  SymbolTable st = SymbolTable::beam();
  st.parameters.insert({"a", "b", "n", "a0", "a1"});
  return parse(s, st);
}

TEST(Models, EquationsMatchTheBeamOperators) {
  EXPECT_TRUE(is_zero(models::make_model(ModelKind::EulerBernoulli).equation - P("alpha*beta*u_xxxx + u_tt")));
  EXPECT_TRUE(is_zero(models::make_model(ModelKind::Rayleigh).equation - P("alpha*beta*u_xxxx + u_tt - beta*u_xxtt")));
  EXPECT_TRUE(is_zero(models::make_model(ModelKind::Timoshenko).equation -
                      P("alpha*beta*u_xxxx + u_tt - beta*(1 + epsilon)*u_xxtt + epsilon*beta*u_tttt/alpha")));
  EXPECT_TRUE(is_zero(models::make_model(ModelKind::EulerBernoulli, {}, SourceSpec::of(SourceKind::Exponential)).equation -
                      P("alpha*beta*u_xxxx + u_tt - exp(a*u + b)")));
}

TEST(Models, RejectsInvalidParameters) {
  models::ModelParams p;
  p.alpha = Expr(0);
  EXPECT_THROW(models::make_model(ModelKind::EulerBernoulli, p), std::invalid_argument);
  p = {};
  p.beta = Expr(-1);
  EXPECT_THROW(models::make_model(ModelKind::Rayleigh, p), std::invalid_argument);
  p = {};
  p.epsilon = Expr(-1);
  EXPECT_THROW(models::make_model(ModelKind::Timoshenko, p), std::invalid_argument);
  SourceSpec s = SourceSpec::of(SourceKind::Power);
  s.n = Expr(1);
  EXPECT_THROW(models::make_model(ModelKind::EulerBernoulli, {}, s), std::invalid_argument);
  s = SourceSpec::of(SourceKind::Exponential);
  s.a = Expr(0);
  EXPECT_THROW(models::make_model(ModelKind::EulerBernoulli, {}, s), std::invalid_argument);
}

TEST(Models, KindNamesRoundTrip) {
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko})
    EXPECT_EQ(models::parse_model_kind(models::to_string(k)), k);
  EXPECT_EQ(models::parse_source_kind("exp"), SourceKind::Exponential);
  EXPECT_THROW(models::parse_model_kind("kirchhoff"), std::invalid_argument);
}

TEST(Catalog, UnknownPairRejected) {
  EXPECT_THROW(models::builtin_catalog(ModelKind::Rayleigh, SourceKind::Power), std::invalid_argument);
}

TEST(Catalog, DimensionsAsTabulated) {
  EXPECT_EQ(models::builtin_catalog(ModelKind::EulerBernoulli, SourceKind::None).expected_dimension, 4u);
  EXPECT_EQ(models::builtin_catalog(ModelKind::Rayleigh, SourceKind::None).expected_dimension, 3u);
  EXPECT_EQ(models::builtin_catalog(ModelKind::EulerBernoulli, SourceKind::Linear).expected_dimension, 3u);
  EXPECT_EQ(models::builtin_catalog(ModelKind::EulerBernoulli, SourceKind::Power).expected_dimension, 3u);
  EXPECT_EQ(models::builtin_catalog(ModelKind::Timoshenko, SourceKind::Arbitrary).generators.size(), 2u);
}

TEST(Catalog, EveryGeneratorIsASymmetry) {
  for (const auto& [mk, sk] : models::tabulated_pairs()) {
    const auto m = models::make_model(mk, {}, SourceSpec::of(sk));
    for (const auto& g : models::builtin_catalog(mk, sk).generators)
      EXPECT_TRUE(is_zero(jet::symmetry_residual(g.field, m))) << m.name << " " << g.label;
  }
}

TEST(Catalog, TabulatedLinearScalingLeavesResidual) {
  const auto m = models::make_model(ModelKind::EulerBernoulli, {}, SourceSpec::of(SourceKind::Linear));
  const Expr r = jet::symmetry_residual(jet::field({}, {{"u", Expr::jet("u")}}), m);
  EXPECT_TRUE(equivalent(r, P("b")) == Equivalence::Equal || equivalent(r, P("-b")) == Equivalence::Equal)
      << to_string(r);
}

TEST(Catalog, SolverDimensionsMatchCatalogs) {
  for (const auto& [mk, sk] : models::tabulated_pairs()) {
    const auto m = models::make_model(mk, {}, SourceSpec::of(sk));
    const auto cat = models::builtin_catalog(mk, sk);
    const auto r = jet::solve_determining(m);
    EXPECT_EQ(r.generic.basis.size(), cat.expected_dimension) << m.name;
    EXPECT_EQ(r.generic.superposition_family, cat.superposition_family) << m.name;
    for (const auto& g : cat.generators)
      EXPECT_TRUE(jet::span_contains(r.generic.basis, g.field, m).member) << m.name << " " << g.label;
  }
}

}  // namespace
}  // namespace beamsym
