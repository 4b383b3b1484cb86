#include "beamsym/jet.hpp"
#include "beamsym/models.hpp"
#include "beamsym/parse.hpp"

#include <gtest/gtest.h>

namespace beamsym {
namespace {

using jet::VectorField;
using models::ModelKind;
using models::SourceKind;

const Expr t = Expr::independent("t");
const Expr x = Expr::independent("x");
const Expr u = Expr::jet("u");
const std::vector<std::string> kTX{"t", "x"};

Expr P(const std::string& s) {
  SymbolTable st = SymbolTable::beam();
  st.parameters.insert({"a", "b", "n"});
  return parse(s, st);
}

VectorField scaling() { return jet::field({{"t", 2 * t}, {"x", x}}, {}); }

TEST(Prolong, TranslationHasZeroCoefficients) {
  const auto pf = jet::prolong(jet::translation("x"), kTX, "u", 4);
  EXPECT_EQ(pf.eta.size(), 1u + jet::multi_indices(kTX, 4).size());
  for (const auto& [j, e] : pf.eta) EXPECT_TRUE(e.is_zero()) << j;
}

TEST(Prolong, LinearScalingCopiesJets) {
  const auto pf = jet::prolong(jet::field({}, {{"u", u}}), kTX, "u", 2);
  for (const auto& [j, e] : pf.eta) EXPECT_EQ(e, Expr::jet("u", j)) << j;
}

TEST(Prolong, ScalingFieldSecondOrder) {
  const auto pf = jet::prolong(scaling(), kTX, "u", 2);
  EXPECT_EQ(pf.eta.at("tt"), P("-4*u_tt"));
  EXPECT_EQ(pf.eta.at("xx"), P("-2*u_xx"));
  EXPECT_EQ(pf.eta.at("tx"), P("-3*u_tx"));
  EXPECT_EQ(pf.eta.at("t"), P("-2*u_t"));
}

TEST(Prolong, RejectsOrderAboveFour) { EXPECT_THROW(jet::prolong(scaling(), kTX, "u", 5), std::invalid_argument); }

// Independent re-derivation of the recursion eta^(J,i) = D_i eta^(J) - sum_j u_{J,j} D_i xi^j.
TEST(Prolong, RecursionIdentityOnGenericField) {
  const VectorField vf = jet::field({{"t", P("t*x + u")}, {"x", P("x^2*u")}}, {{"u", P("t*u^2 + x")}});
  const auto pf = jet::prolong(vf, kTX, "u", 3);
  for (const auto& [J, eta] : pf.eta) {
    if (J.size() >= 3) continue;
    for (const auto& i : kTX) {
      const std::string Ji = canonical_index(J + i);
      Expr expect = total_derivative(eta, i);
      for (const auto& j : kTX) {
        expect = expect - Expr::jet("u", canonical_index(J + j)) * total_derivative(vf.xi_of(j), i);
      }
      EXPECT_TRUE(is_zero(pf.eta.at(Ji) - expect)) << Ji;
    }
  }
}

TEST(Residual, ScalingAdmittedByEulerBernoulli) {
  const auto eb = models::make_model(ModelKind::EulerBernoulli);
  EXPECT_TRUE(jet::symmetry_residual(scaling(), eb).is_zero());
}

TEST(Residual, ScalingRejectedByRayleigh) {
  const auto r = models::make_model(ModelKind::Rayleigh);
  EXPECT_FALSE(is_zero(jet::symmetry_residual(scaling(), r)));
}

TEST(Residual, LinearScalingAdmittedBySourceFreeModels) {
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto m = models::make_model(k);
    EXPECT_TRUE(jet::symmetry_residual(jet::field({}, {{"u", u}}), m).is_zero()) << models::to_string(k);
  }
}

TEST(Residual, LinearInTheFieldBeforeReduction) {
  const auto m = models::make_model(ModelKind::Timoshenko);
  const VectorField a = scaling();
  const VectorField b = jet::field({{"x", t}}, {{"u", P("x*u + t^2")}});
  const Expr lhs = jet::symmetry_condition(a + b, m);
  const Expr rhs = jet::symmetry_condition(a, m) + jet::symmetry_condition(b, m);
  EXPECT_TRUE(is_zero(lhs - rhs));
}

TEST(Residual, LeadingJetSelection) {
  EXPECT_EQ(models::make_model(ModelKind::EulerBernoulli).leading_jet(), Expr::jet("u", "tt"));
  EXPECT_EQ(models::make_model(ModelKind::Rayleigh).leading_jet(), Expr::jet("u", "ttxx"));
  EXPECT_EQ(models::make_model(ModelKind::Timoshenko).leading_jet(), Expr::jet("u", "tttt"));
}

TEST(OnShell, SolvedFormSubstitutesToZero) {
  for (auto k : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto m = models::make_model(k);
    EXPECT_TRUE(is_zero(substitute(m.equation, m.leading_jet(), m.solved.solved))) << models::to_string(k);
  }
}

TEST(OnShell, DivisionRecombines) {
  const auto m = models::make_model(ModelKind::EulerBernoulli);
  const auto os = m.on_shell();
  const Expr e = P("x*u_tttx + u_tt^2 + t*u_xx");
  const auto d = os.divide(e);
  EXPECT_TRUE(is_zero(e - os.combine(d.cofactors) - d.remainder));
  EXPECT_FALSE(os.principal(Expr::jet("u", "xxxx")).has_value());
  for (const auto& a : free_atoms(d.remainder)) EXPECT_FALSE(a.is_jet() && os.principal(a)) << to_string(a);
}

TEST(Commutator, HandComputedBrackets) {
  EXPECT_TRUE(jet::equal(jet::commutator(jet::translation("t"), scaling()), jet::translation("t") * Expr(2)));
  EXPECT_TRUE(jet::equal(jet::commutator(jet::translation("x"), scaling()), jet::translation("x")));
  EXPECT_TRUE(jet::commutator(jet::field({}, {{"u", u}}), scaling()).is_zero());
}

TEST(Commutator, Antisymmetric) {
  const VectorField a = jet::field({{"t", P("t*x")}}, {{"u", P("u*x")}});
  const VectorField b = jet::field({{"x", P("t^2")}}, {{"u", P("u + t")}});
  EXPECT_TRUE((jet::commutator(a, b) + jet::commutator(b, a)).is_zero());
}

TEST(VectorField, DescribeAndJson) {
  const VectorField f = jet::field({{"t", 2 * t}, {"x", x}}, {{"u", P("-4/a")}});
  EXPECT_EQ(f.describe(), "2*t*d_t + x*d_x - 4/a*d_u");
  SymbolTable st = SymbolTable::beam();
  st.parameters.insert("a");
  EXPECT_TRUE(jet::equal(VectorField::from_json(f.to_json(), st), f));
}

TEST(Superposition, MembersSolveTheLinearPart) {
  const auto eb = models::make_model(ModelKind::EulerBernoulli);
  EXPECT_TRUE(jet::is_superposition_member(jet::field({}, {{"u", P("t*x^3")}}), eb));
  EXPECT_FALSE(jet::is_superposition_member(jet::field({}, {{"u", P("t^2")}}), eb));
}

TEST(Determining, EulerBernoulliSourceFree) {
  const auto eb = models::make_model(ModelKind::EulerBernoulli);
  const auto r = jet::solve_determining(eb);
  EXPECT_EQ(r.generic.basis.size(), 4u);
  EXPECT_TRUE(r.generic.superposition_family);
  const auto cat = models::builtin_catalog(ModelKind::EulerBernoulli, SourceKind::None);
  for (const auto& g : cat.generators) EXPECT_TRUE(jet::span_contains(r.generic.basis, g.field, eb).member) << g.label;
}

TEST(Determining, RayleighSourceFree) {
  const auto m = models::make_model(ModelKind::Rayleigh);
  const auto r = jet::solve_determining(m);
  EXPECT_EQ(r.generic.basis.size(), 3u);
  EXPECT_FALSE(jet::span_contains(r.generic.basis, scaling(), m).member);
}

TEST(Determining, TimoshenkoSourceFree) {
  const auto m = models::make_model(ModelKind::Timoshenko);
  EXPECT_EQ(jet::solve_determining(m).generic.basis.size(), 3u);
}

TEST(Determining, ExponentialSourceScaling) {
  const auto m = models::make_model(ModelKind::EulerBernoulli, {}, models::SourceSpec::of(SourceKind::Exponential));
  const auto r = jet::solve_determining(m);
  EXPECT_EQ(r.generic.basis.size(), 3u);
  const VectorField g = jet::field({{"t", 2 * t}, {"x", x}}, {{"u", P("-4/a")}});
  EXPECT_TRUE(jet::span_contains(r.generic.basis, g, m).member);
}

TEST(Determining, PowerSourceSplitsOnExponent) {
  const auto m = models::make_model(ModelKind::EulerBernoulli, {}, models::SourceSpec::of(SourceKind::Power));
  const auto r = jet::solve_determining(m);
  EXPECT_EQ(r.generic.basis.size(), 3u);
  const VectorField g = jet::field({{"t", P("2*(n - 1)*t")}, {"x", P("(n - 1)*x")}}, {{"u", P("-4*(u + b/a)")}});
  EXPECT_TRUE(jet::span_contains(r.generic.basis, g, m).member);
}

TEST(Structure, CatalogsCloseAndSatisfyJacobi) {
  for (const auto& [mk, sk] : models::tabulated_pairs()) {
    const auto m = models::make_model(mk, {}, models::SourceSpec::of(sk));
    const auto cat = models::builtin_catalog(mk, sk);
    std::vector<VectorField> basis;
    for (const auto& g : cat.generators) basis.push_back(g.field);
    const auto table = jet::structure_constants(basis, m);
    EXPECT_TRUE(table.closed) << m.name;
    for (const auto& row : table.constants)
      for (const auto& cell : row) {
        if (!cell) continue;
        for (const auto& c : *cell)
          EXPECT_FALSE(contains_atom(c, [](const Expr& a) { return a.kind() == Kind::Independent || a.is_jet(); }))
              << m.name << ": " << to_string(c);
      }
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        for (std::size_t k = j + 1; k < basis.size(); ++k) {
          const auto& A = basis[i];
          const auto& B = basis[j];
          const auto& C = basis[k];
          const VectorField s = jet::commutator(A, jet::commutator(B, C)) + jet::commutator(B, jet::commutator(C, A)) +
                                jet::commutator(C, jet::commutator(A, B));
          EXPECT_TRUE(s.normalized().is_zero()) << m.name;
        }
  }
}

}  // namespace
}  // namespace beamsym
