#include "beamsym/models.hpp"

#include <stdexcept>

namespace beamsym::models {

using jet::ModelParameter;
using jet::VectorField;

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::EulerBernoulli:
      return "eb";
    case ModelKind::Rayleigh:
      return "rayleigh";
    case ModelKind::Timoshenko:
      return "timoshenko";
  }
  return "?";
}

std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::None:
      return "none";
    case SourceKind::Linear:
      return "linear";
    case SourceKind::Power:
      return "power";
    case SourceKind::Exponential:
      return "exp";
    case SourceKind::Constant:
      return "constant";
    case SourceKind::Affine:
      return "affine";
    case SourceKind::Arbitrary:
      return "arbitrary";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "eb") return ModelKind::EulerBernoulli;
  if (s == "rayleigh") return ModelKind::Rayleigh;
  if (s == "timoshenko") return ModelKind::Timoshenko;
  throw std::invalid_argument("unknown model '" + s + "' (expected eb, rayleigh or timoshenko)");
}

SourceKind parse_source_kind(const std::string& s) {
  for (auto k : {SourceKind::None, SourceKind::Linear, SourceKind::Power, SourceKind::Exponential,
                 SourceKind::Constant, SourceKind::Affine, SourceKind::Arbitrary}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown source '" + s + "'");
}

Expr source_term(const SourceSpec& spec, const Expr& u) {
  switch (spec.kind) {
    case SourceKind::None:
      return Expr(0);
    case SourceKind::Linear:
      return spec.a * u + spec.b;
    case SourceKind::Power:
      return exp(spec.n * log(spec.a * u + spec.b));
    case SourceKind::Exponential:
      return exp(spec.a * u + spec.b);
    case SourceKind::Constant:
      return spec.a0;
    case SourceKind::Affine:
      return spec.a1 * u + spec.a0;
    case SourceKind::Arbitrary:
      return Expr::arbitrary("f", 0, u);
  }
  return Expr(0);
}

Expr beam_operator(ModelKind kind, const ModelParams& p, const std::string& dependent) {
  const Expr ab = p.alpha * p.beta;
  const Expr u_tt = Expr::jet(dependent, "tt");
  const Expr u_xxxx = Expr::jet(dependent, "xxxx");
  switch (kind) {
    case ModelKind::EulerBernoulli:
      return ab * u_xxxx + u_tt;
    case ModelKind::Rayleigh:
      return ab * u_xxxx + u_tt - p.beta * Expr::jet(dependent, "ttxx");
    case ModelKind::Timoshenko:
      return ab * u_xxxx + u_tt - p.beta * (Expr(1) + p.epsilon) * Expr::jet(dependent, "ttxx") +
             p.epsilon * p.beta * Expr::jet(dependent, "tttt") / p.alpha;
  }
  return Expr(0);
}

namespace {

void require_positive(const Expr& v, const char* name) {
  if (v.is_constant() && !(v.value() > Rational(0)))
    throw std::invalid_argument(std::string(name) + " must be positive, got " + beamsym::to_string(v));
}

void declare(std::vector<ModelParameter>& params, const Expr& e, bool positive, bool nonzero,
             std::vector<Rational> excluded = {}) {
  for (const auto& a : free_atoms(e)) {
    if (a.kind() != Kind::Parameter) continue;
    bool found = false;
    for (auto& p : params) {
      if (p.name != a.name()) continue;
      found = true;
      // flags only make sense when the expression is the parameter itself
      if (e == a) {
        p.positive = p.positive || positive;
        p.nonzero = p.nonzero || nonzero;
        p.excluded.insert(p.excluded.end(), excluded.begin(), excluded.end());
      }
    }
    if (!found) {
      ModelParameter p{a.name(), false, false, {}};
      if (e == a) {
        p.positive = positive;
        p.nonzero = nonzero;
        p.excluded = excluded;
      }
      params.push_back(p);
    }
  }
}

}  // namespace

jet::PdeModel make_model(ModelKind kind, const ModelParams& params, const SourceSpec& source) {
  require_positive(params.alpha, "alpha");
  require_positive(params.beta, "beta");
  if (kind == ModelKind::Timoshenko && params.epsilon.is_constant() && params.epsilon.value().is_negative())
    throw std::invalid_argument("epsilon must be non-negative");

  switch (source.kind) {
    case SourceKind::Power:
      if (source.n.is_constant() && (source.n.value().is_zero() || source.n.value().is_one()))
        throw std::invalid_argument("power source requires n not in {0, 1}");
      [[fallthrough]];
    case SourceKind::Exponential:
    case SourceKind::Linear:
      if (source.a.is_zero()) throw std::invalid_argument("source requires a != 0");
      break;
    default:
      break;
  }

  std::vector<ModelParameter> declared;
  declare(declared, params.alpha, true, true);
  declare(declared, params.beta, true, true);
  if (kind == ModelKind::Timoshenko) declare(declared, params.epsilon, true, true);
  switch (source.kind) {
    case SourceKind::Linear:
      declare(declared, source.a, false, true);
      declare(declared, source.b, false, false);
      break;
    case SourceKind::Power:
      declare(declared, source.a, false, true);
      declare(declared, source.b, false, false);
      declare(declared, source.n, false, true, {Rational(0), Rational(1)});
      break;
    case SourceKind::Exponential:
      declare(declared, source.a, false, true);
      declare(declared, source.b, false, false);
      break;
    case SourceKind::Constant:
      declare(declared, source.a0, false, false);
      break;
    case SourceKind::Affine:
      declare(declared, source.a1, false, true);
      declare(declared, source.a0, false, false);
      break;
    default:
      break;
  }

  const Expr u = Expr::jet("u");
  const Expr f = source_term(source, u);
  std::set<std::string> functions;
  if (source.kind == SourceKind::Arbitrary) functions.insert("f");
  std::string name = to_string(kind);
  if (source.kind != SourceKind::None) name += "+" + to_string(source.kind);
  jet::PdeModel m = jet::make_pde(name, beam_operator(kind, params) - f, declared, f, functions);
  if (source.kind == SourceKind::Power) {
    // collect in W = a*u + b so that (a*u + b)^n and its derivatives share one atom
    const Expr W = Expr::jet("W");
    m.collection_substitution = std::make_pair(u, (W - source.b) / source.a);
  }
  return m;
}

// ---- catalogs -----------------------------------------------------------------------

namespace {

const Expr t = Expr::independent("t");
const Expr x = Expr::independent("x");
const Expr u = Expr::jet("u");

VectorField d_t() { return jet::translation("t"); }
VectorField d_x() { return jet::translation("x"); }
VectorField u_du() { return jet::field({}, {{"u", u}}); }

CatalogGenerator gen(std::string label, VectorField f, std::string printed, std::string note = {}) {
  return {std::move(label), std::move(f), std::move(printed), std::move(note)};
}

}  // namespace

CatalogEntry builtin_catalog(ModelKind model, SourceKind source) {
  CatalogEntry e;
  e.model = model;
  e.source = source;
  const Expr a = Expr::parameter("a");
  const Expr b = Expr::parameter("b");
  const Expr n = Expr::parameter("n");

  const VectorField shifted_u = jet::field({}, {{"u", u + b / a}});
  const std::string linear_note =
      "tabulated as u*d_u, which leaves the residual b; the generator valid for f = a*u + b is (u + b/a)*d_u";

  if (source == SourceKind::None) {
    e.superposition_family = true;
    switch (model) {
      case ModelKind::EulerBernoulli:
        e.family_symbol = "a";
        e.generators = {gen("Gamma_1a", d_x(), "d_x"), gen("Gamma_2a", d_t(), "d_t"),
                        gen("Gamma_3a", u_du(), "u*d_u"),
                        gen("Gamma_4a", jet::field({{"t", 2 * t}, {"x", x}}, {}), "2*t*d_t + x*d_x")};
        e.expected_dimension = 4;
        return e;
      case ModelKind::Rayleigh:
        e.family_symbol = "b";
        e.generators = {gen("Gamma_1b", d_t(), "d_t"), gen("Gamma_2b", d_x(), "d_x"),
                        gen("Gamma_3b", u_du(), "u*d_u")};
        e.expected_dimension = 3;
        return e;
      case ModelKind::Timoshenko:
        e.family_symbol = "c";
        e.generators = {gen("Gamma_1c", d_t(), "d_t"), gen("Gamma_2c", d_x(), "d_x"),
                        gen("Gamma_3c", u_du(), "u*d_u")};
        e.expected_dimension = 3;
        return e;
    }
  }
  if (source == SourceKind::Linear) {
    e.superposition_family = true;
    e.family_symbol = "b";
    e.generators = {gen("Gamma_1^f1", d_t(), "d_t"), gen("Gamma_2^f1", d_x(), "d_x"),
                    gen("Gamma_3^f1", shifted_u, "u*d_u", linear_note)};
    e.expected_dimension = 3;
    return e;
  }
  if (source == SourceKind::Arbitrary) {
    e.generators = {gen("Gamma_1^f4", d_t(), "d_t"), gen("Gamma_2^f4", d_x(), "d_x")};
    e.expected_dimension = 2;
    return e;
  }
  if (model == ModelKind::EulerBernoulli && source == SourceKind::Power) {
    e.generators = {gen("Gamma_1^f2", d_t(), "d_t"), gen("Gamma_2^f2", d_x(), "d_x"),
                    gen("Gamma_3^f2",
                        jet::field({{"t", 2 * (n - 1) * t}, {"x", (n - 1) * x}}, {{"u", -4 * (u + b / a)}}),
                        "2*(n - 1)*t*d_t + (n - 1)*x*d_x - 4*(u + b/a)*d_u")};
    e.expected_dimension = 3;
    return e;
  }
  if (model == ModelKind::EulerBernoulli && source == SourceKind::Exponential) {
    e.generators = {gen("Gamma_1^f3", d_t(), "d_t"), gen("Gamma_2^f3", d_x(), "d_x"),
                    gen("Gamma_3^f3", jet::field({{"t", 2 * t}, {"x", x}}, {{"u", Expr(-4) / a}}),
                        "2*t*d_t + x*d_x - 4/a*d_u")};
    e.expected_dimension = 3;
    return e;
  }
  throw std::invalid_argument("no tabulated catalog for (" + to_string(model) + ", " + to_string(source) + ")");
}

std::vector<std::pair<ModelKind, SourceKind>> tabulated_pairs() {
  return {
      {ModelKind::EulerBernoulli, SourceKind::None},   {ModelKind::Rayleigh, SourceKind::None},
      {ModelKind::Timoshenko, SourceKind::None},       {ModelKind::EulerBernoulli, SourceKind::Linear},
      {ModelKind::EulerBernoulli, SourceKind::Power},  {ModelKind::EulerBernoulli, SourceKind::Exponential},
      {ModelKind::EulerBernoulli, SourceKind::Arbitrary}, {ModelKind::Rayleigh, SourceKind::Linear},
      {ModelKind::Rayleigh, SourceKind::Arbitrary},    {ModelKind::Timoshenko, SourceKind::Linear},
      {ModelKind::Timoshenko, SourceKind::Arbitrary},
  };
}

}  // namespace beamsym::models
