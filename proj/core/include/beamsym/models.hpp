#pragma once

// Registry of the Euler-Bernoulli, Rayleigh and Timoshenko-Prescott beam
// equations, their forced variants and the tabulated symmetry catalogs.

#include "beamsym/jet.hpp"

#include <string>
#include <vector>

namespace beamsym::models {

enum class ModelKind { EulerBernoulli, Rayleigh, Timoshenko };
enum class SourceKind { None, Linear, Power, Exponential, Constant, Affine, Arbitrary };

std::string to_string(ModelKind k);    // "eb", "rayleigh", "timoshenko"
std::string to_string(SourceKind k);   // "none", "linear", "power", "exp", ...
ModelKind parse_model_kind(const std::string& s);
SourceKind parse_source_kind(const std::string& s);

/// Forcing term f(u). Parameters default to the symbols a, b, n, a0, a1.
struct SourceSpec {
  SourceKind kind = SourceKind::None;
  Expr a = Expr::parameter("a");
  Expr b = Expr::parameter("b");
  Expr n = Expr::parameter("n");
  Expr a0 = Expr::parameter("a0");
  Expr a1 = Expr::parameter("a1");

  static SourceSpec none() { return {}; }
  static SourceSpec of(SourceKind k) {
    SourceSpec s;
    s.kind = k;
    return s;
  }
};

/// f(u) for the given spec; power sources are written exp(n*log(a*u + b)).
Expr source_term(const SourceSpec& spec, const Expr& u);

struct ModelParams {
  Expr alpha = Expr::parameter("alpha");
  Expr beta = Expr::parameter("beta");
  Expr epsilon = Expr::parameter("epsilon");
};

/// Left-hand operator of the beam equation applied to u.
Expr beam_operator(ModelKind kind, const ModelParams& p, const std::string& dependent = "u");

/// E = operator(u) - f(u), solved for its leading jet.
jet::PdeModel make_model(ModelKind kind, const ModelParams& params = {}, const SourceSpec& source = {});

struct CatalogGenerator {
  std::string label;
  jet::VectorField field;
  std::string printed;   // generator as tabulated
  std::string note;      // set when the tabulated form differs from `field`
};

struct CatalogEntry {
  ModelKind model;
  SourceKind source;
  std::vector<CatalogGenerator> generators;
  std::size_t expected_dimension = 0;
  bool superposition_family = false;
  std::string family_symbol;  // name of the arbitrary solution in the family generator
};

/// Tabulated catalog for the pair; throws std::invalid_argument for other pairs.
CatalogEntry builtin_catalog(ModelKind model, SourceKind source);
std::vector<std::pair<ModelKind, SourceKind>> tabulated_pairs();

}  // namespace beamsym::models
