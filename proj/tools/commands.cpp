#include "commands.hpp"

#include "beamsym/claws.hpp"
#include "beamsym/jet.hpp"
#include "beamsym/numlab.hpp"
#include "beamsym/painleve.hpp"
#include "beamsym/parse.hpp"
#include "beamsym/reduce.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace beamsym::cli {

using models::ModelKind;
using models::SourceKind;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

const std::array<Expr, 4> kSymbolicConstants = {Expr::parameter("C0"), Expr::parameter("C1"), Expr::parameter("C2"),
                                                Expr::parameter("C3")};

// Values used for symbols left free on the command line.
const Assignment kReference = {{"alpha", 3}, {"beta", 0.5}, {"epsilon", 0.2}, {"c", 1}};

// max |e| over random (t, x) or s in [-3, 3]; free parameters take reference or random values.
double random_point_max(const Expr& e, std::uint64_t seed, int points, std::vector<std::string> coords) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3, 3), value(0.5, 2);
  Assignment base;
  for (const auto& atom : free_atoms(e)) {
    const std::string key = atom_key(atom);
    if (std::find(coords.begin(), coords.end(), key) != coords.end()) continue;
    const auto ref = kReference.find(key);
    base[key] = ref != kReference.end() ? ref->second : value(rng);
  }
  double worst = 0;
  for (int i = 0; i < points; ++i) {
    Assignment a = base;
    for (const auto& c : coords) a[c] = coord(rng);
    worst = std::max(worst, std::abs(eval_numeric(e, a)));
  }
  return worst;
}

Expr rational_or_symbol(const std::string& flag, const std::string& text, const std::string& symbol) {
  return text.empty() ? Expr::parameter(symbol) : Expr(parse_rational(flag, text));
}

}  // namespace

// ---- RunReport -----------------------------------------------------------------------

void RunReport::add(std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

void RunReport::settle(const std::string& on_failure) {
  status = "pass";
  for (const auto& c : checks)
    if (!c.pass) status = on_failure;
}

Json RunReport::to_json() const {
  Json out = {{"command", command}, {"inputs", inputs}, {"status", status}};
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  out["checks"] = cs;
  out["data"] = data;
  if (wall_seconds) out["wall_seconds"] = *wall_seconds;
  return out;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << command << ": " << status << "\n";
  for (const auto& c : checks) {
    os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << "\n";
  }
  for (const auto& [k, v] : data.items())
    if (v.is_string()) os << "  " << k << ": " << v.get<std::string>() << "\n";
    else if (v.is_number()) os << "  " << k << ": " << v.dump() << "\n";
  return os.str();
}

// ---- Options -------------------------------------------------------------------------

Rational parse_rational(const std::string& flag, const std::string& text) {
  const auto r = Rational::parse(text);
  if (!r) throw UsageError(flag + ": expected a rational p/q, got '" + text + "'");
  return *r;
}

ModelKind Options::model_kind() const {
  try {
    return models::parse_model_kind(model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SourceKind Options::source_kind() const {
  try {
    return models::parse_source_kind(source);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

models::ModelParams Options::params() const {
  return {rational_or_symbol("--alpha", alpha, "alpha"), rational_or_symbol("--beta", beta, "beta"),
          rational_or_symbol("--epsilon", epsilon, "epsilon")};
}

models::SourceSpec Options::source_spec() const {
  auto s = models::SourceSpec::of(source_kind());
  s.a = rational_or_symbol("--a", a, "a");
  s.b = rational_or_symbol("--b", b, "b");
  s.n = rational_or_symbol("--n", n, "n");
  s.a0 = rational_or_symbol("--a0", a0, "a0");
  s.a1 = rational_or_symbol("--a1", a1, "a1");
  return s;
}

Expr Options::speed_or(const Expr& fallback) const {
  return speed.empty() ? fallback : Expr(parse_rational("--speed", speed));
}

Json Options::echo() const {
  Json j = {{"model", model}, {"source", source}};
  auto put = [&](const char* k, const std::string& v) { j[k] = v.empty() ? Json(nullptr) : Json(v); };
  put("alpha", alpha);
  put("beta", beta);
  put("epsilon", epsilon);
  if (source != "none") {
    put("a", a);
    put("b", b);
    put("n", n);
    put("a0", a0);
    put("a1", a1);
  }
  put("speed", speed);
  return j;
}

namespace {

models::CatalogEntry catalog(const Options& o) {
  try {
    return models::builtin_catalog(o.model_kind(), o.source_kind());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

// ---- symmetry commands ---------------------------------------------------------------

RunReport check_symmetries(const Options& o) {
  RunReport r{"check-symmetries", o.echo()};
  const auto cat = catalog(o);
  const auto model = models::make_model(o.model_kind(), o.params(), o.source_spec());
  Json gens = Json::array();
  for (const auto& g : cat.generators) {
    const Expr res = jet::symmetry_residual(g.field, model);
    const bool ok = is_zero(res);
    r.add(g.label, ok, ok ? g.field.describe() : "residual " + to_string(res));
    Json row = {{"label", g.label}, {"field", g.field.describe()}, {"tabulated", g.printed}, {"residual", to_string(res)}};
    if (!g.note.empty()) row["note"] = g.note;
    gens.push_back(row);
  }
  r.data = {{"model", model.name}, {"finite_generators", cat.generators.size()},
            {"superposition_family", cat.superposition_family}, {"generators", gens}};
  r.settle();
  return r;
}

RunReport solve_determining(const Options& o, int degree) {
  RunReport r{"solve-determining", o.echo()};
  r.inputs["degree"] = degree;
  if (degree < 1) throw UsageError("--degree must be positive");
  const auto model = models::make_model(o.model_kind(), o.params(), o.source_spec());
  const auto res = jet::solve_determining(model, {degree});
  Json basis = Json::array();
  for (const auto& b : res.generic.basis) basis.push_back(b.describe());
  Json splits = Json::array();
  for (const auto& s : res.splits) {
    Json sb = Json::array();
    for (const auto& b : s.basis) sb.push_back(b.describe());
    splits.push_back({{"condition", s.condition}, {"basis", sb}});
  }
  r.data = {{"model", model.name},
            {"unknowns", res.unknowns},
            {"equations", res.equations},
            {"dimension", res.generic.basis.size()},
            {"basis", basis},
            {"assumptions", res.generic.assumptions},
            {"superposition_family", res.generic.superposition_family},
            {"splits", splits}};
  try {
    const auto cat = models::builtin_catalog(o.model_kind(), o.source_kind());
    r.add("dimension", res.generic.basis.size() == cat.expected_dimension,
          std::to_string(res.generic.basis.size()) + " (catalog " + std::to_string(cat.expected_dimension) + ")");
    for (const auto& g : cat.generators) {
      const auto s = jet::span_contains(res.generic.basis, g.field, model);
      r.add(g.label + " in span", s.member, g.field.describe());
    }
  } catch (const std::invalid_argument&) {
    r.add("basis", true, std::to_string(res.generic.basis.size()) + " generators, no catalog for comparison");
  }
  r.settle();
  return r;
}

RunReport commutators(const Options& o) {
  RunReport r{"commutators", o.echo()};
  const auto cat = catalog(o);
  const auto model = models::make_model(o.model_kind(), o.params(), o.source_spec());
  std::vector<jet::VectorField> basis;
  Json labels = Json::array();
  for (const auto& g : cat.generators) {
    basis.push_back(g.field);
    labels.push_back(g.label);
  }
  const auto table = jet::structure_constants(basis, model);
  Json rows = Json::array();
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const jet::VectorField c = jet::commutator(basis[i], basis[j]).normalized();
      const auto& k = table.constants[i][j];
      std::string combo = "not in span";
      if (k) {
        combo.clear();
        for (std::size_t m = 0; m < k->size(); ++m) {
          if ((*k)[m].is_zero()) continue;
          if (!combo.empty()) combo += " + ";
          combo += "(" + to_string((*k)[m]) + ")*" + cat.generators[m].label;
        }
        if (combo.empty()) combo = "0";
        if (!(c - [&] {
               jet::VectorField s;
               for (std::size_t m = 0; m < k->size(); ++m) s = s + basis[m] * (*k)[m];
               return s;
             }()).normalized().is_zero())
          combo += " + family member";
      }
      const std::string name = "[" + cat.generators[i].label + ", " + cat.generators[j].label + "]";
      r.add(name, k.has_value(), combo);
      rows.push_back({{"pair", {cat.generators[i].label, cat.generators[j].label}},
                      {"commutator", c.describe()},
                      {"combination", combo}});
    }
  r.data = {{"generators", labels}, {"closed", table.closed}, {"table", rows}};
  r.settle();
  return r;
}

// ---- reductions and closed forms -----------------------------------------------------

RunReport reduce(const Options& o, const std::string& rule) {
  RunReport r{"reduce", o.echo()};
  r.inputs["rule"] = rule;
  if (rule == "travelling-wave") {
    const auto model = models::make_model(o.model_kind(), o.params(), o.source_spec());
    const auto red = reduce::apply_reduction(model, reduce::travelling_wave_rule(o.speed_or(Expr::parameter("c"))),
                                             "travelling-wave");
    r.add("generator admitted", red.generator_admitted);
    r.add("ansatz invariant", red.ansatz_invariant);
    r.data = {{"model", model.name}, {"ode", red.ode.pretty()}};
    r.settle();
    return r;
  }
  const auto labels = reduce::reproduction_labels();
  if (std::find(labels.begin(), labels.end(), rule) == labels.end())
    throw UsageError("unknown rule '" + rule + "'");
  const auto rep = reduce::reproduce(rule);
  r.add("generator admitted", rep.reduction.generator_admitted);
  r.add("ansatz invariant", rep.reduction.ansatz_invariant);
  Json diffs = Json::array();
  for (const auto& d : rep.comparison.differences)
    diffs.push_back({{"term", to_string(d.monomial)}, {"derived", to_string(d.derived)}, {"printed", to_string(d.printed)}});
  std::string detail = rep.comparison.match ? "factor " + to_string(rep.comparison.factor)
                                            : std::to_string(rep.comparison.differences.size()) + " differing terms";
  r.add("matches tabulated ODE", rep.comparison.match, detail);
  r.data = {{"label", rep.label},
            {"description", rep.description},
            {"derived", rep.reduction.ode.pretty()},
            {"tabulated", rep.printed},
            {"differences", diffs},
            {"discrepancy_permitted", rep.discrepancy_permitted},
            {"notes", rep.notes}};
  const bool structural = rep.reduction.generator_admitted && rep.reduction.ansatz_invariant;
  r.status = !structural ? "fail" : rep.comparison.match ? "pass" : "discrepancy";
  return r;
}

RunReport solve(const Options& o) {
  RunReport r{"solve", o.echo()};
  const Expr c = o.speed_or(Expr::parameter("c"));
  const auto kind = o.source_kind();
  if (kind == SourceKind::None) {
    try {
      const auto tw = reduce::travelling_wave_solution(o.model_kind(), o.params(), c, kSymbolicConstants);
      const double worst = random_point_max(tw.raw_residual, o.seed, checks::kResidualPoints, {"t", "x"});
      if (o.model_kind() == ModelKind::EulerBernoulli) r.add("symbolic residual", tw.residual.is_zero(), to_string(tw.residual));
      r.add("numeric residual", worst < checks::kResidualTolerance, "max " + sci(worst) + " at 1000 points");
      r.data = {{"solution", to_string(tw.solution)}, {"k_squared", to_string(tw.k_squared)},
                {"a4", to_string(tw.a4)}, {"a2", to_string(tw.a2)}, {"max_numeric_residual", worst}};
    } catch (const reduce::RegimeError& e) {
      r.add("regime", false, e.what());
    }
  } else if (kind == SourceKind::Constant || kind == SourceKind::Affine) {
    const auto spec = o.source_spec();
    const std::array<Expr, 4> v = {Expr::parameter("v1"), Expr::parameter("v2"), Expr::parameter("v3"),
                                   Expr::parameter("v4")};
    const auto fs = kind == SourceKind::Constant ? reduce::constant_source_solution(c, spec.a0, v)
                                                 : reduce::affine_source_solution(c, spec.a1, spec.a0, v);
    r.add("symbolic residual", fs.residual.is_zero(), to_string(fs.residual));
    Json ex = Json::array();
    for (const auto& e : fs.exponents) ex.push_back(to_string(e));
    r.data = {{"solution", to_string(fs.solution)}, {"exponents", ex}};
  } else {
    throw UsageError("solve supports --source none, constant or affine");
  }
  r.settle();
  return r;
}

RunReport painleve(const PainleveOptions& p) {
  RunReport r{"painleve", {{"ode", p.ode.empty() ? Json(nullptr) : Json(p.ode)},
                           {"equation", p.equation.empty() ? Json(nullptr) : Json(p.equation)},
                           {"order", p.order}}};
  if (p.ode.empty() == p.equation.empty()) throw UsageError("give exactly one of --ode and --equation");
  if (p.order < 1) throw UsageError("--order must be positive");
  reduce::OdeModel ode;
  if (!p.ode.empty()) {
    const auto names = painleve::registry_names();
    if (std::find(names.begin(), names.end(), p.ode) == names.end()) throw UsageError("unknown ODE '" + p.ode + "'");
    ode = painleve::registry_ode(p.ode);
  } else {
    ode.name = "equation";
    ode.independent = "x";
    ode.dependent = "y";
    try {
      ode.equation = reduce::parse_ode(p.equation, "x", "y");
    } catch (const std::exception& e) {
      throw UsageError(std::string("--equation: ") + e.what());
    }
  }
  const auto rep = painleve::painleve_test(ode, p.order);
  for (const auto& b : rep.branches) {
    std::string res;
    for (const auto& x : b.resonances) res += (res.empty() ? "" : ", ") + x.str();
    r.add("branch p=" + b.p.str() + " a=" + b.a.str(), b.status.rfind("fails", 0) != 0, "resonances {" + res + "}, " + b.status);
  }
  r.add("verdict", rep.verdict == "passes", rep.verdict);
  r.data = Json::parse(rep.to_json());
  r.settle();
  return r;
}

RunReport claws(const Options& o, const std::string& phi_text) {
  RunReport r{"claws", o.echo()};
  r.inputs["phi"] = phi_text;
  if (o.source_kind() != SourceKind::None) throw UsageError("claws supports the source-free models");
  const auto kind = o.model_kind();
  const auto model = models::make_model(kind, o.params());
  std::vector<claws::Multiplier> mults;
  for (const auto& m : claws::default_multipliers())
    if (phi_text == "all" || phi_text == m.name) mults.push_back(m);
  if (mults.empty()) {
    SymbolTable st = model.symbols();
    try {
      mults.push_back({phi_text, parse(phi_text, st)});
    } catch (const std::exception& e) {
      throw UsageError(std::string("--phi: ") + e.what());
    }
  }
  std::vector<claws::PrintedPair> printed;
  for (const auto& p : claws::printed_pairs())
    if (p.model == kind) printed.push_back(p);
  Json records = Json::array();
  for (const auto& mu : mults) {
    if (!claws::check_multiplier(model, mu.phi)) {
      r.add("multiplier " + mu.name, false, "does not solve the adjoint equation");
      continue;
    }
    r.add("multiplier " + mu.name, true, "solves the adjoint equation");
    for (const auto& g : claws::catalog_generators(kind)) {
      const auto cv = claws::conserved_vector(model, g, mu);
      const auto div = claws::verify_divergence(kind, cv, checks::kDivergenceGrid);
      std::optional<claws::PairComparison> match;
      if (mu.name == "A0")
        for (const auto& p : printed)
          if (p.label == g.label) match = claws::compare_pair(model, cv, p);
      const bool ok = div.symbolic_ok && div.numeric_max < checks::kDivergenceTolerance;
      r.add(g.label + " with " + mu.name, ok,
            ok ? "certified, max |div| " + sci(div.numeric_max) : "divergence " + div.residual);
      records.push_back(Json::parse(claws::to_json(cv, div, match)));
    }
  }
  r.data = {{"model", model.name}, {"conserved_vectors", records}};
  r.settle();
  return r;
}

// ---- numerics ------------------------------------------------------------------------

RunReport simulate(const Options& o, const SimulateOptions& s) {
  RunReport r{"simulate", o.echo()};
  r.inputs.update(Json{{"nx", s.nx}, {"T", s.T}, {"dt", s.dt}, {"frames", s.frames}, {"ladder", s.ladder},
                       {"check_stability", s.check_stability}});
  auto num = [](const std::string& flag, const std::string& text, double fallback) {
    return text.empty() ? fallback : parse_rational(flag, text).to_double();
  };
  const numlab::Params p{num("--alpha", o.alpha, 2), num("--beta", o.beta, 0.5), num("--epsilon", o.epsilon, 0.2)};
  const double c = num("--speed", o.speed, 1);
  const auto kind = o.model_kind();
  if (o.source_kind() != SourceKind::None) throw UsageError("simulate supports the source-free models");
  if (s.ladder) {
    if (kind != ModelKind::EulerBernoulli) throw UsageError("--ladder runs on --model eb");
    const auto ladder = numlab::convergence_ladder(p, c, {s.nx, 2 * s.nx, 4 * s.nx});
    Json rungs = Json::array();
    for (const auto& g : ladder.rungs) rungs.push_back({{"nx", g.Nx}, {"dt", g.dt}, {"error", g.error}});
    for (std::size_t i = 0; i < ladder.orders.size(); ++i) {
      const double ord = ladder.orders[i];
      r.add("order " + std::to_string(ladder.rungs[i].Nx) + "->" + std::to_string(ladder.rungs[i + 1].Nx),
            std::abs(ord - checks::kOrderTarget) <= checks::kOrderTolerance, sci(ord));
    }
    r.data = {{"rungs", rungs}, {"orders", ladder.orders}};
    r.settle();
    return r;
  }
  auto to_rational = [](double v) { return Expr(Rational(static_cast<long>(std::llround(v * 1e6)), 1000000)); };
  const models::ModelParams mp{to_rational(p.alpha), to_rational(p.beta), to_rational(p.epsilon)};
  reduce::TravellingWave tw;
  try {
    tw = reduce::travelling_wave_solution(kind, mp, to_rational(c), {Expr(0), Expr(0), Expr(1), Expr(0)});
  } catch (const reduce::RegimeError& e) {
    r.add("regime", false, e.what());
    r.settle();
    return r;
  }
  numlab::GridSpec g;
  g.params = p;
  g.Lx = 2 * std::numbers::pi / std::sqrt(eval_numeric(tw.k_squared, {}));
  g.Nx = s.nx;
  g.T = s.T;
  g.dt = s.dt;
  g.frames = s.frames;
  g.check_stability = s.check_stability;
  r.data = {{"initial", to_string(tw.solution)}, {"Lx", g.Lx}};
  try {
    const auto sim = numlab::simulate(kind, g, tw.solution);
    const double err = numlab::max_error(sim, tw.solution);
    const double res = numlab::residual_on_grid(kind, tw.solution, g, 16);
    r.add("stable", true, std::to_string(sim.steps) + " steps of dt " + sci(sim.grid.dt));
    r.add("exact residual", res < checks::kResidualTolerance, "max " + sci(res));
    r.data["dt"] = sim.grid.dt;
    r.data["steps"] = sim.steps;
    r.data["max_error"] = err;
    r.data["crest_speed"] = numlab::crest_speed(sim);
    if (!s.csv.empty()) {
      std::ofstream out(s.csv);
      if (!out) throw UsageError("cannot write " + s.csv);
      numlab::write_csv(out, sim, tw.solution);
      r.data["csv"] = s.csv;
    }
  } catch (const numlab::InstabilityError& e) {
    r.add("stable", false, e.what());
  } catch (const numlab::SingularOperatorError& e) {
    r.add("operator invertible", false, e.what());
  } catch (const numlab::NumlabError& e) {
    throw UsageError(e.what());
  }
  r.settle();
  return r;
}

RunReport report_all(std::uint64_t seed) {
  RunReport r{"report-all", {{"seed", seed}}};
  Json criteria = Json::array();
  for (const auto& c : checks::run_all(seed)) {
    r.add(std::to_string(c.id) + " " + c.title, c.pass, c.summary);
    criteria.push_back(c.to_json());
  }
  r.data = {{"criteria", criteria}};
  r.settle();
  return r;
}

}  // namespace beamsym::cli
