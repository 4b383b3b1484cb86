#pragma once

// Lie point symmetries on jet space: vector fields, prolongation, the
// symmetry condition modulo the equation, brackets, and an ansatz-based
// solver for the determining equations.

#include "beamsym/expr.hpp"
#include "beamsym/linsolve.hpp"
#include "beamsym/parse.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace beamsym::jet {

constexpr int kMaxOrder = 4;

/// sum_i xi^i d_i + sum_a eta^a d_{u^a}; components depend on independents and dependents only.
struct VectorField {
  std::map<std::string, Expr> xi;
  std::map<std::string, Expr> eta;

  Expr xi_of(const std::string& v) const;
  Expr eta_of(const std::string& dep) const;
  bool is_zero() const;
  /// Drops zero components and expands the rest.
  VectorField normalized() const;

  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField operator*(const Expr& k) const;

  /// "2*t*d_t + x*d_x - 4/a*d_u"
  std::string describe() const;
  /// {"xi": {"t": "...", "x": "..."}, "eta": {"u": "..."}}
  std::string to_json() const;
  static VectorField from_json(std::string_view text, const SymbolTable& symbols);
};

bool equal(const VectorField& a, const VectorField& b);

/// d_t, d_x, ... and u*d_u style constructors.
VectorField translation(const std::string& v);
VectorField field(std::map<std::string, Expr> xi, std::map<std::string, Expr> eta);

struct ProlongedField {
  VectorField base;
  std::string dependent;
  std::map<std::string, Expr> eta;  // canonical multi-index -> eta^(J); "" is eta itself
  int order = 0;
};

/// All canonical multi-indices over `independents` with length 1..order.
std::vector<std::string> multi_indices(const std::vector<std::string>& independents, int order);

ProlongedField prolong(const VectorField& vf, const std::vector<std::string>& independents, const std::string& dependent,
                       int order);

/// Applies the (unprolonged) field as a derivation to a function of independents and dependents.
Expr apply(const VectorField& vf, const Expr& f);

/// Replaces jets of `dependent` by derivatives of an explicit function of the independents.
Expr insert_solution(const Expr& e, const std::string& dependent, const Expr& solution);

/// One equation E = 0 solved for its leading jet: dependent_{leading} = solved.
struct SolvedEquation {
  std::string dependent;
  std::string leading_index;
  Expr equation;
  Expr coefficient;  // coefficient of the leading jet in E; free of jets
  Expr solved;

  Expr leading_jet() const { return Expr::jet(dependent, leading_index); }
};

/// Builds a solved form by isolating the highest-ranked jet whose coefficient is jet-free.
SolvedEquation solve_for_leading(const Expr& equation, const std::string& dependent,
                                 const std::vector<std::string>& independents);
/// Same, with the leading index prescribed.
SolvedEquation solve_for(const Expr& equation, const std::string& dependent, const std::string& leading_index);

/// Normal form of jet expressions modulo a set of solved equations and all
/// their differential consequences.
class OnShell {
 public:
  OnShell(std::vector<SolvedEquation> equations, std::vector<std::string> independents);

  /// Replaces every principal jet by its normal form and expands.
  Expr reduce(const Expr& e) const;

  struct Cofactor {
    std::size_t equation;  // index into equations()
    std::string index;     // K in D_K E
    Expr lambda;
  };
  struct Division {
    Expr remainder;
    std::vector<Cofactor> cofactors;
  };
  /// Writes e = sum lambda_K * D_K E + remainder with remainder free of principal jets.
  Division divide(const Expr& e) const;
  /// Expands sum lambda_K * D_K E.
  Expr combine(const std::vector<Cofactor>& cofactors) const;

  const std::vector<SolvedEquation>& equations() const { return eqs_; }
  /// (equation, K) when `jet` is a derivative of a leading jet.
  std::optional<std::pair<std::size_t, std::string>> principal(const Expr& jet) const;

 private:
  std::vector<SolvedEquation> eqs_;
  std::vector<std::string> indeps_;
};

/// Ranking used to order jets: (t-order, total order, index).
bool jet_ranks_above(const Expr& a, const Expr& b, const std::vector<std::string>& independents);

struct ModelParameter {
  std::string name;
  bool positive = false;
  bool nonzero = false;
  std::vector<Rational> excluded;  // values the parameter may not take
};

struct PdeModel {
  std::string name;
  std::vector<std::string> independents{"t", "x"};
  std::string dependent{"u"};
  std::vector<ModelParameter> parameters;
  std::set<std::string> functions;
  Expr equation;  // E = 0
  Expr source;    // f(u) with E = operator(u) - f(u)
  SolvedEquation solved;
  /// Optional change of variables u -> expression used before collecting
  /// determining equations (makes power-law sources polynomial in a new atom).
  std::optional<std::pair<Expr, Expr>> collection_substitution;

  SymbolTable symbols() const;
  Expr leading_jet() const { return solved.leading_jet(); }
  int order() const;
  OnShell on_shell() const;
  /// True when E is affine in the jets of the dependent variable.
  bool affine() const;
  /// Linear part of E applied to another dependent: E(w) - E(0). Requires affine().
  Expr linear_operator(const std::string& other) const;
  bool known_nonzero(const Expr& e) const;
};

/// Builds a model from an equation, picking the leading jet automatically.
PdeModel make_pde(std::string name, const Expr& equation, std::vector<ModelParameter> parameters,
                  const Expr& source = Expr(0), std::set<std::string> functions = {});

/// Prolonged field applied to E, reduced modulo the equation.
Expr symmetry_residual(const VectorField& vf, const PdeModel& model);
/// Prolonged field applied to E without on-shell reduction.
Expr symmetry_condition(const VectorField& vf, const PdeModel& model);

VectorField commutator(const VectorField& a, const VectorField& b);

/// True when eta = w(t,x) d_u with w satisfying the model's linear part.
bool is_superposition_member(const VectorField& vf, const PdeModel& model);

struct SpanResult {
  bool member = false;
  std::vector<Expr> coefficients;  // on the finite basis
  VectorField remainder;           // superposition part
};
/// Is `vf` a combination of `basis` plus a member of the superposition family?
SpanResult span_contains(const std::vector<VectorField>& basis, const VectorField& vf, const PdeModel& model);

struct AnsatzSpec {
  int degree = 2;
};

struct DeterminingBranch {
  std::string condition;                   // "generic" or "n - 1 = 0"
  std::vector<std::string> assumptions;    // pivots assumed nonzero
  std::vector<VectorField> basis;          // finite part
  std::size_t superposition_modes = 0;     // polynomial members of the superposition family found
  bool superposition_family = false;       // infinite family w(t,x) d_u present
};

struct DeterminingResult {
  int degree = 2;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  DeterminingBranch generic;
  std::vector<DeterminingBranch> splits;
};

DeterminingResult solve_determining(const PdeModel& model, const AnsatzSpec& ansatz = {});

/// Substitutes a parameter value throughout a model and rebuilds its solved form.
PdeModel specialize(const PdeModel& model, const std::string& parameter, const Expr& value);

/// Structure constants of a finite algebra: [b_i, b_j] = sum_k c^k_ij b_k (+ family).
struct StructureTable {
  std::vector<std::vector<std::optional<std::vector<Expr>>>> constants;  // nullopt: not closed
  bool closed = true;
};
StructureTable structure_constants(const std::vector<VectorField>& basis, const PdeModel& model);

}  // namespace beamsym::jet
