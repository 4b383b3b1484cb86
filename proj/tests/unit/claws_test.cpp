#include "beamsym/claws.hpp"

#include <gtest/gtest.h>

namespace beamsym {
namespace {

using models::ModelKind;

const Expr q = Expr::jet("q");
const Expr u = Expr::jet("u");
const Expr A0 = Expr::parameter("A0");

Expr P(const std::string& text, const std::string& family = "") {
  SymbolTable st;
  st.parameters = {"alpha", "beta", "epsilon", "A0", "A1", "A2"};
  st.independents = {"t", "x"};
  st.dependents = {"u", "q"};
  if (!family.empty()) st.dependents.insert(family);
  return expand(parse(text, st));
}

const ModelKind kAll[] = {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko};

claws::Generator find(ModelKind k, const std::string& label) {
  for (const auto& g : claws::catalog_generators(k))
    if (g.label == label) return g;
  throw std::invalid_argument(label);
}

TEST(Lagrangian, FormalLagrangians) {
  EXPECT_EQ(claws::formal_lagrangian(models::make_model(ModelKind::EulerBernoulli)), P("q*(u_tt + alpha*beta*u_xxxx)"));
  EXPECT_EQ(claws::formal_lagrangian(models::make_model(ModelKind::Rayleigh)),
            P("q*(alpha*beta*u_xxxx + u_tt - beta*u_ttxx)"));
  EXPECT_EQ(claws::formal_lagrangian(models::make_model(ModelKind::Timoshenko)),
            P("q*(alpha*beta*u_xxxx + u_tt - beta*(1 + epsilon)*u_ttxx + epsilon*beta*u_tttt/alpha)"));
}

TEST(Adjoint, LinearOperatorsAreSelfAdjoint) {
  for (auto k : kAll) {
    const auto m = models::make_model(k);
    EXPECT_EQ(claws::adjoint_equation(m), expand(m.linear_operator("q"))) << models::to_string(k);
  }
  EXPECT_EQ(claws::variational_derivative(q * u, "u", {"t", "x"}), q);
  // d/du of q*u_x*u is q*u_x; minus D_x(q*u) gives -q_x*u.
  EXPECT_EQ(claws::variational_derivative(q * u * Expr::jet("u", "x"), "u", {"t", "x"}), P("-q_x*u"));
}

TEST(Multiplier, ConstantAndAffine) {
  for (auto k : kAll) {
    const auto m = models::make_model(k);
    for (const auto& mu : claws::default_multipliers()) EXPECT_TRUE(claws::check_multiplier(m, mu.phi)) << mu.name;
  }
  EXPECT_FALSE(claws::check_multiplier(models::make_model(ModelKind::EulerBernoulli), pow(u, 2)));
}

TEST(ConservedVector, CertificatesAndNumericDivergence) {
  for (auto k : kAll) {
    const auto m = models::make_model(k);
    for (const auto& g : claws::catalog_generators(k))
      for (const auto& mu : claws::default_multipliers()) {
        const auto cv = claws::conserved_vector(m, g, mu);
        EXPECT_TRUE(cv.certificate.ok) << g.label << " " << mu.name << ": " << to_string(cv.certificate.remainder);
        const auto d = claws::verify_divergence(k, cv);
        EXPECT_LT(d.numeric_max, 1e-8) << g.label << " " << mu.name;
      }
  }
}

TEST(ConservedVector, ScalingOfTheField) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto cv = claws::conserved_vector(m, find(ModelKind::EulerBernoulli, "Gamma_3a"), {"phi", q});
  EXPECT_EQ(cv.ct, P("-u*q_t + u_t*q"));
  const auto c1 = claws::conserved_vector(m, find(ModelKind::EulerBernoulli, "Gamma_1a"), {"A0", A0});
  EXPECT_EQ(c1.ct, P("-A0*u_tx"));
}

TEST(ConservedVector, LinearInTheGenerator) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto a = find(ModelKind::EulerBernoulli, "Gamma_1a");
  const auto b = find(ModelKind::EulerBernoulli, "Gamma_4a");
  const claws::Generator sum{"sum", a.field + b.field, ""};
  const claws::Multiplier mu = claws::default_multipliers()[1];
  const auto ca = claws::conserved_vector(m, a, mu);
  const auto cb = claws::conserved_vector(m, b, mu);
  const auto cs = claws::conserved_vector(m, sum, mu);
  EXPECT_TRUE(is_zero(cs.ct - ca.ct - cb.ct));
  EXPECT_TRUE(is_zero(cs.cx - ca.cx - cb.cx));
}

TEST(ConservedVector, SuperpositionMemberHasCertificate) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const Expr t = Expr::independent("t"), x = Expr::independent("x");
  const claws::Generator g{"w d_u", jet::field({}, {{"u", t * pow(x, 3)}}), ""};
  const auto cv = claws::conserved_vector(m, g, claws::default_multipliers()[1]);
  EXPECT_TRUE(cv.certificate.ok);
}

TEST(ConservedVector, CorruptedComponentFails) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto cv = claws::conserved_vector(m, find(ModelKind::EulerBernoulli, "Gamma_4a"), {"A0", A0});
  const auto terms = terms_of(cv.cx);
  ASSERT_GT(terms.size(), 1u);
  const auto bad = claws::divergence_certificate(m, cv.ct, cv.cx - terms.front());
  EXPECT_FALSE(bad.ok);
  EXPECT_FALSE(to_string(bad.remainder).empty());
}

TEST(PrintedPairs, EveryPairHasAVerdict) {
  int exact = 0;
  for (const auto& p : claws::printed_pairs()) {
    const auto m = models::make_model(p.model);
    const auto cv = claws::conserved_vector(m, find(p.model, p.label), {"A0", A0});
    const auto c = claws::compare_pair(m, cv, p);
    if (c.kind == claws::MatchKind::Exact) ++exact;
    else EXPECT_FALSE(c.detail.empty()) << p.label;
  }
  EXPECT_GE(exact, 1);
}

TEST(PrintedPairs, ScalingPairExactAndTyposFlagged) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto pairs = claws::printed_pairs();
  auto compare = [&](const std::string& label) {
    for (const auto& p : pairs)
      if (p.model == ModelKind::EulerBernoulli && p.label == label)
        return claws::compare_pair(m, claws::conserved_vector(m, find(p.model, label), {"A0", A0}), p);
    throw std::invalid_argument(label);
  };
  EXPECT_EQ(compare("Gamma_4a").kind, claws::MatchKind::Exact);
  const auto g3 = compare("Gamma_3a");
  EXPECT_EQ(g3.kind, claws::MatchKind::Discrepancy);
  EXPECT_NE(g3.detail.find("not conserved"), std::string::npos);
}

TEST(PrintedPairs, CurlShiftIsGaugeEquivalent) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto g = find(ModelKind::EulerBernoulli, "Gamma_2a");
  const auto cv = claws::conserved_vector(m, g, {"A0", A0});
  const Expr theta = P("q*u_x - x*q_t*u");
  const claws::PrintedPair shifted{ModelKind::EulerBernoulli, g.label,
                                   to_string(expand(cv.ct_generic + total_derivative(theta, "x"))),
                                   to_string(expand(cv.cx_generic - total_derivative(theta, "t")))};
  const auto c = claws::compare_pair(m, cv, shifted);
  EXPECT_EQ(c.kind, claws::MatchKind::GaugeEquivalent) << c.detail;
  EXPECT_TRUE(c.theta.has_value());
}

TEST(ConservedVector, JsonFields) {
  const auto k = ModelKind::Timoshenko;
  const auto cv = claws::conserved_vector(models::make_model(k), find(k, "Gamma_1c"), {"A0", A0});
  const auto d = claws::verify_divergence(k, cv);
  EXPECT_TRUE(d.symbolic_ok);
  EXPECT_LT(d.numeric_max, 1e-8);
  const auto j = claws::to_json(cv, d, std::nullopt);
  for (const char* key : {"generator", "phi", "ct", "cx", "lambda", "symbolic_ok", "numeric_max_divergence", "tabulated_match"})
    EXPECT_NE(j.find(std::string("\"") + key + "\""), std::string::npos) << key;
}

}  // namespace
}  // namespace beamsym
