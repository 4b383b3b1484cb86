#pragma once

// Conservation laws by nonlinear self-adjointness: formal Lagrangian q*E,
// adjoint equation, multiplier checks, conserved vectors with divergence
// certificates, and comparison against tabulated component pairs.

#include "beamsym/jet.hpp"
#include "beamsym/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace beamsym::claws {

/// Adjoint variable of the formal Lagrangian.
inline constexpr const char* kAdjoint = "q";

/// q*E with q a new dependent variable.
Expr formal_lagrangian(const jet::PdeModel& model);

/// sum_J (-D)_J dL/du_J over canonical multi-indices up to order 4.
Expr variational_derivative(const Expr& lagrangian, const std::string& dependent,
                            const std::vector<std::string>& independents);

/// delta(q*E)/delta u.
Expr adjoint_equation(const jet::PdeModel& model);

/// Replaces q and its jets by total derivatives of phi(t, x, u).
Expr substitute_multiplier(const Expr& e, const Expr& phi);

/// Does q = phi solve the adjoint equation on solutions of the model?
bool check_multiplier(const jet::PdeModel& model, const Expr& phi);

struct Multiplier {
  std::string name;
  Expr phi;
};
/// A0 and A1*u + A2.
std::vector<Multiplier> default_multipliers();

/// Generator of a conservation law: a catalog field or a member w(t,x)*d_u of the superposition
/// family, with w written as the jet of a second dependent `family`.
struct Generator {
  std::string label;
  jet::VectorField field;
  std::string family;  // empty for point fields
};
/// Catalog generators of a source-free model plus its family generator.
std::vector<Generator> catalog_generators(models::ModelKind kind);

struct Certificate {
  std::vector<jet::OnShell::Cofactor> cofactors;  // divergence = sum lambda_K D_K E_e
  Expr remainder;
  bool ok = false;
};

struct ConservedVector {
  std::string model;
  Generator generator;
  Multiplier multiplier;
  Expr ct_generic, cx_generic;  // in q and its jets
  Expr ct, cx;                  // with q = phi
  Certificate certificate;
};

/// Ibragimov conserved vector through fourth-order terms, with q = phi substituted.
ConservedVector conserved_vector(const jet::PdeModel& model, const Generator& generator, const Multiplier& multiplier);

/// Off-shell certificate of D_t c^t + D_x c^x for given components.
Certificate divergence_certificate(const jet::PdeModel& model, const Expr& ct, const Expr& cx,
                                   const std::string& family = "");

struct DivergenceReport {
  bool symbolic_ok = false;
  std::string residual;  // printed remainder when the symbolic check fails
  double numeric_max = 0;
};

/// Symbolic certificate plus max |D_t c^t + D_x c^x| over a grid x grid sample of exact
/// travelling-wave data (alpha = 2, beta = 1/2, epsilon = 1/5, speed 1).
DivergenceReport verify_divergence(models::ModelKind kind, const ConservedVector& cv, int grid = 64);

enum class MatchKind { Exact, GaugeEquivalent, Discrepancy };
std::string to_string(MatchKind m);

struct PairComparison {
  MatchKind kind = MatchKind::Discrepancy;
  std::string detail;
  std::optional<Expr> theta;  // c^t -> c^t + D_x theta, c^x -> c^x - D_t theta
};

/// Tabulated component pair for a catalog label, written in q-notation.
struct PrintedPair {
  models::ModelKind model;
  std::string label;
  std::string ct, cx;
};
std::vector<PrintedPair> printed_pairs();

/// Compares generic-q components modulo the model, its adjoint and total curls.
PairComparison compare_pair(const jet::PdeModel& model, const ConservedVector& cv, const PrintedPair& printed);

/// JSON record {generator, phi, ct, cx, lambda, symbolic_ok, numeric_max_divergence, tabulated_match}.
std::string to_json(const ConservedVector& cv, const DivergenceReport& div, const std::optional<PairComparison>& match);

}  // namespace beamsym::claws
