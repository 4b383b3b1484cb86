#pragma once

// Similarity reductions of the beam equations to ODEs, order reductions of
// those ODEs, comparison against tabulated ODEs, and closed-form solutions.

#include "beamsym/jet.hpp"
#include "beamsym/models.hpp"

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsym::reduce {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter values outside the regime where a closed form is real or non-degenerate.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scalar ODE E(s, v, v_s, ...) = 0; derivatives are jets v_s, v_ss, ...
struct OdeModel {
  std::string name;
  std::string independent = "s";
  std::string dependent = "v";
  Expr equation;

  int order() const;
  Expr derivative(int k) const;
  SymbolTable symbols() const;
  /// E solved for its highest derivative.
  jet::SolvedEquation solved() const;
  /// Equation with primes: "16*s^5*v'''' + ...".
  std::string pretty() const;
};

enum class AnsatzForm { Product, Sum };  // u = M*v(s) or u = M + v(s)

struct ReductionRule {
  std::string name;
  jet::VectorField generator;
  Expr similarity;  // s(t, x)
  Expr multiplier;  // M(t, x)
  AnsatzForm form = AnsatzForm::Product;
};

/// Per-monomial difference between a derived and a tabulated ODE.
struct TermDiff {
  Expr monomial;  // product of dependent-variable factors
  Expr derived;   // scaled to the tabulated normalization
  Expr printed;
};

struct Comparison {
  bool match = false;
  Expr factor;  // derived = factor * printed on the leading monomial
  std::vector<TermDiff> differences;
};

/// Compares two ODEs up to a common factor free of the dependent variable.
Comparison compare_odes(const Expr& derived, const Expr& printed, const std::string& dependent);

struct Reduction {
  std::string rule;
  bool generator_admitted = false;  // symmetry residual of the generator vanishes
  bool ansatz_invariant = false;
  OdeModel ode;
};

/// Substitutes the ansatz, rewrites derivatives by the chain rule and cancels the common multiplier.
Reduction apply_reduction(const jet::PdeModel& model, const ReductionRule& rule, const std::string& ode_name = "");

/// True when the ansatz u = M*v(s) (or M + v) is mapped to itself by the rule's generator.
bool ansatz_invariant(const ReductionRule& rule, const std::string& dependent = "u");

enum class OrderGenerator { Shift, Scale };  // d_v and v*d_v

/// Is the generator a point symmetry of the ODE?
bool admits(const OdeModel& ode, OrderGenerator g);
/// Shift: new dependent v'; scale: new dependent v'/v. The order drops by one.
OdeModel order_reduce(const OdeModel& ode, OrderGenerator g, const std::string& new_independent,
                      const std::string& new_dependent, const std::string& name = "");

/// Rule for u = v(x - c*t) under d_t + c*d_x.
ReductionRule travelling_wave_rule(const Expr& c);

/// Parses "lhs = rhs" (or a bare expression) as lhs - rhs in the ODE's variables,
/// with the usual beam parameters available as symbols.
Expr parse_ode(const std::string& text, const std::string& independent, const std::string& dependent);

// ---- named reproductions -------------------------------------------------------------

struct Reproduction {
  std::string label;        // "eq7", "eq02e", ...
  std::string description;
  Reduction reduction;
  std::string printed;      // tabulated ODE
  Comparison comparison;
  bool discrepancy_permitted = false;
  std::vector<std::string> notes;
};

/// Labels accepted by reproduce(): eq7, eq02e, eq02f, eq02g, eq02h, eq02i, eq02j, eq02m, forced-power, forced-exp.
std::vector<std::string> reproduction_labels();
Reproduction reproduce(const std::string& label);

// ---- closed forms ------------------------------------------------------------------

struct TravellingWave {
  Expr a4;           // coefficient of v'''' in the reduced ODE
  Expr a2;           // coefficient of v''
  Expr k_squared;    // a2 / a4
  Expr solution;     // u(t, x)
  Expr residual;     // E(u), canonical
  Expr raw_residual; // E(u) before expansion, for numeric evaluation
};

/// u = C0 + C1*(x - c*t) + C2*sin(k*(x - c*t)) + C3*cos(k*(x - c*t)) with k^2 from the
/// re-derived reduced ODE. Throws RegimeError when k is not real and nonzero.
TravellingWave travelling_wave_solution(models::ModelKind kind, const models::ModelParams& params, const Expr& c,
                                        const std::array<Expr, 4>& constants);

struct ForcedSolution {
  Expr solution;  // v(s)
  Expr residual;  // v'''' + c^2 v'' - f(v)
  std::vector<Expr> exponents;  // affine case: lambda with v ~ exp(lambda*s)
};

/// v'''' + c^2 v'' = a0 with the general solution in sin, cos and a quadratic.
ForcedSolution constant_source_solution(const Expr& c, const Expr& a0, const std::array<Expr, 4>& constants);
/// v'''' + c^2 v'' = a1*v + a0 with four exponentials and the constant -a0/a1.
/// Exponents are written lambda = mu^(1/2) with mu a root of mu^2 + c^2 mu - a1; for mu < 0
/// these are the imaginary exponents i*sqrt(2c^2 -+ 2 sqrt(c^4 + 4 a1))/2.
ForcedSolution affine_source_solution(const Expr& c, const Expr& a1, const Expr& a0, const std::array<Expr, 4>& constants);

}  // namespace beamsym::reduce
