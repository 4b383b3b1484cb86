#include "checks.hpp"

#include "beamsym/claws.hpp"
#include "beamsym/numlab.hpp"
#include "beamsym/painleve.hpp"
#include "beamsym/reduce.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <set>

namespace beamsym::checks {

using models::ModelKind;
using models::SourceKind;

namespace {

const ModelKind kModels[] = {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko};

Json rational_list(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& r : v) out.push_back(r.str());
  return out;
}

// Is g = lambda * b for some lambda free of t, x and the jets?
bool proportional(const jet::VectorField& b, const jet::VectorField& g) {
  const auto bn = b.normalized(), gn = g.normalized();
  std::optional<Expr> lambda;
  auto pick = [&](const Expr& bc, const Expr& gc) {
    if (!lambda && !bc.is_zero()) lambda = simplify(gc * inverse(bc));
  };
  for (const auto& [v, c] : bn.xi) pick(c, gn.xi_of(v));
  for (const auto& [d, c] : bn.eta) pick(c, gn.eta_of(d));
  if (!lambda) return false;
  if (contains_atom(*lambda, [](const Expr& a) { return a.kind() == Kind::Independent || a.is_jet(); })) return false;
  return (bn * *lambda - gn).normalized().is_zero();
}

CriterionResult symmetries() {
  CriterionResult r{1, "symmetry catalogs: every tabulated generator has zero residual"};
  int total = 0, failed = 0;
  Json bad = Json::array();
  for (const auto& [mk, sk] : models::tabulated_pairs()) {
    const auto model = models::make_model(mk, {}, models::SourceSpec::of(sk));
    for (const auto& g : models::builtin_catalog(mk, sk).generators) {
      ++total;
      const Expr res = jet::symmetry_residual(g.field, model);
      if (!is_zero(res)) {
        ++failed;
        bad.push_back({{"model", model.name}, {"generator", g.label}, {"residual", to_string(res)}});
      }
    }
  }
  r.pass = failed == 0;
  r.summary = std::to_string(total - failed) + "/" + std::to_string(total) + " generators with exact zero residual";
  r.details = {{"generators", total}, {"failures", bad}};
  return r;
}

CriterionResult determining() {
  CriterionResult r{2, "determining equations: dimensions and extra forced generators"};
  bool ok = true;
  Json d = Json::object();
  {
    const auto eb = models::make_model(ModelKind::EulerBernoulli);
    const auto res = jet::solve_determining(eb);
    const Expr t = Expr::independent("t"), x = Expr::independent("x"), u = Expr::jet("u");
    const std::vector<std::pair<std::string, jet::VectorField>> expected = {
        {"d_t", jet::translation("t")},
        {"d_x", jet::translation("x")},
        {"u*d_u", jet::field({}, {{"u", u}})},
        {"2*t*d_t + x*d_x", jet::field({{"t", 2 * t}, {"x", x}}, {})}};
    Json contains = Json::object();
    for (const auto& [name, f] : expected) {
      const auto s = jet::span_contains(res.generic.basis, f, eb);
      const bool in = s.member && s.remainder.normalized().is_zero();
      contains[name] = in;
      ok = ok && in;
    }
    ok = ok && res.generic.basis.size() == 4;
    d["eb"] = {{"dimension", res.generic.basis.size()}, {"contains", contains}};
  }
  for (auto mk : {ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    const auto res = jet::solve_determining(models::make_model(mk));
    ok = ok && res.generic.basis.size() == 3;
    d[models::to_string(mk)] = {{"dimension", res.generic.basis.size()}};
  }
  for (auto sk : {SourceKind::Power, SourceKind::Exponential}) {
    const auto model = models::make_model(ModelKind::EulerBernoulli, {}, models::SourceSpec::of(sk));
    const auto res = jet::solve_determining(model);
    const auto cat = models::builtin_catalog(ModelKind::EulerBernoulli, sk);
    const auto& extra = cat.generators.back();
    bool match = false;
    std::string found;
    for (const auto& b : res.generic.basis)
      if (proportional(b, extra.field)) {
        match = true;
        found = b.describe();
      }
    ok = ok && match && res.generic.basis.size() == cat.expected_dimension;
    d["eb+" + models::to_string(sk)] = {{"dimension", res.generic.basis.size()},
                                        {"tabulated", extra.printed},
                                        {"solver", found},
                                        {"match", match}};
  }
  r.pass = ok;
  r.summary = ok ? "EB 4, Rayleigh 3, Timoshenko 3; forced generators match" : "mismatch";
  r.details = d;
  return r;
}

CriterionResult reductions() {
  CriterionResult r{3, "reductions: required matches and documented discrepancies"};
  const std::set<std::string> required = {"eq7", "eq02f", "eq02g", "eq02h", "eq02i", "eq02j"};
  bool ok = true;
  Json rows = Json::array();
  std::vector<std::string> failed;
  for (const auto& label : reduce::reproduction_labels()) {
    const auto rep = reduce::reproduce(label);
    const bool need = required.count(label) > 0;
    Json diffs = Json::array();
    for (const auto& td : rep.comparison.differences)
      diffs.push_back({{"term", to_string(td.monomial)}, {"derived", to_string(td.derived)}, {"printed", to_string(td.printed)}});
    bool pass;
    std::string verdict;
    if (rep.comparison.match) {
      pass = true;
      verdict = "match";
    } else if (need) {
      pass = false;
      verdict = "required match failed";
    } else {
      pass = rep.discrepancy_permitted && !rep.comparison.differences.empty();
      verdict = "documented discrepancy";
    }
    if (!pass) failed.push_back(label);
    ok = ok && pass;
    rows.push_back({{"label", label},
                    {"derived", rep.reduction.ode.pretty()},
                    {"printed", rep.printed},
                    {"verdict", verdict},
                    {"differences", diffs}});
  }
  r.pass = ok;
  if (ok) {
    r.summary = "all required reductions match";
  } else {
    r.summary = "failed:";
    for (const auto& f : failed) r.summary += " " + f;
  }
  r.details = {{"reductions", rows}};
  return r;
}

CriterionResult travelling_waves(std::uint64_t seed) {
  CriterionResult r{4, "travelling waves: exact EB residual, numeric residuals, degenerate regime"};
  const std::array<Expr, 4> C = {Expr::parameter("C0"), Expr::parameter("C1"), Expr::parameter("C2"), Expr::parameter("C3")};
  const auto eb = reduce::travelling_wave_solution(ModelKind::EulerBernoulli, {}, Expr::parameter("c"), C);
  bool ok = eb.residual.is_zero();
  Json d = {{"eb_symbolic_residual", to_string(eb.residual)}};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-3, 3);
  std::uniform_int_distribution<long> num(-9, 9), den(1, 9);
  const models::ModelParams p{Expr(3), Expr(Rational(1, 2)), Expr(Rational(1, 5))};
  Json numeric = Json::object();
  for (auto mk : kModels) {
    std::array<Expr, 4> Cn;
    for (auto& c : Cn) c = Expr(Rational(num(rng), den(rng)));
    const auto tw = reduce::travelling_wave_solution(mk, p, Expr(1), Cn);
    double worst = 0;
    for (int i = 0; i < kResidualPoints; ++i)
      worst = std::max(worst, std::abs(eval_numeric(tw.raw_residual, {{"t", coord(rng)}, {"x", coord(rng)}})));
    ok = ok && worst < kResidualTolerance;
    numeric[models::to_string(mk)] = worst;
  }
  d["max_numeric_residual"] = numeric;

  Json regime = Json::array();
  for (long c : {1, 2}) {
    bool raised = false;
    std::string message;
    try {
      reduce::travelling_wave_solution(ModelKind::Rayleigh, {Expr(1), Expr(1), Expr::parameter("epsilon")}, Expr(c), C);
    } catch (const reduce::RegimeError& e) {
      raised = true;
      message = e.what();
    }
    ok = ok && raised;
    regime.push_back({{"alpha", 1}, {"beta", 1}, {"c", c}, {"raised", raised}, {"message", message}});
  }
  d["rayleigh_degenerate"] = regime;
  r.pass = ok;
  r.summary = ok ? "EB residual 0; numeric residuals below 1e-9; degenerate regime rejected" : "failed";
  r.details = d;
  return r;
}

CriterionResult forced() {
  CriterionResult r{5, "forced ODE closed forms"};
  const std::array<Expr, 4> C = {Expr::parameter("v1"), Expr::parameter("v2"), Expr::parameter("v3"), Expr::parameter("v4")};
  const Expr c = Expr::parameter("c");
  const auto cs = reduce::constant_source_solution(c, Expr::parameter("a0"), C);
  const auto af = reduce::affine_source_solution(c, Expr::parameter("a1"), Expr::parameter("a0"), C);
  const auto sq = reduce::constant_source_solution(Expr(1), Expr(2), {Expr(0), Expr(0), Expr(0), Expr(0)});
  const Expr s2 = pow(Expr::independent("s"), 2);
  r.pass = cs.residual.is_zero() && af.residual.is_zero() && sq.solution == s2;
  r.summary = r.pass ? "both residuals exactly zero; c = 1, a0 = 2 gives s^2" : "failed";
  r.details = {{"constant_residual", to_string(cs.residual)},
               {"affine_residual", to_string(af.residual)},
               {"quadratic_case", to_string(sq.solution)}};
  return r;
}

CriterionResult painleve_pipeline() {
  CriterionResult r{6, "ARS pipeline on eq02i"};
  const auto rep = painleve::painleve_test(painleve::registry_ode("eq02i"), kSeriesOrder);
  bool ok = rep.balances.size() == 1 && rep.balances[0].p == Rational(-1);
  Json d = Json::object();
  if (!rep.balances.empty()) {
    const auto& b = rep.balances[0];
    const Expr a = Expr::parameter("a");
    const Expr expect = expand((a - 3) * (a - 2) * (a - 1) * a);
    const bool poly = is_zero(b.polynomial * inverse(b.content) - expect);
    ok = ok && poly;
    d["p"] = b.p.str();
    d["leading_polynomial"] = to_string(b.polynomial);
    d["leading_matches"] = poly;
  }
  const std::vector<std::vector<Rational>> want = {{-1, 1, 2}, {-2, -1, 1}, {-3, -2, -1}};
  const painleve::SeriesClass classes[] = {painleve::SeriesClass::Right, painleve::SeriesClass::Mixed,
                                           painleve::SeriesClass::Left};
  Json branches = Json::array();
  ok = ok && rep.branches.size() == 3;
  for (std::size_t i = 0; i < rep.branches.size() && i < 3; ++i) {
    const auto& br = rep.branches[i];
    const bool res_ok = br.a == Rational(static_cast<long>(i + 1)) && br.resonances == want[i];
    const bool cls_ok = br.series_class && *br.series_class == classes[i];
    ok = ok && res_ok && cls_ok;
    branches.push_back({{"a", br.a.str()},
                        {"resonances", rational_list(br.resonances)},
                        {"class", br.series_class ? painleve::to_string(*br.series_class) : "none"},
                        {"status", br.status}});
  }
  d["branches"] = branches;
  if (!rep.branches.empty() && rep.branches[0].series) {
    const auto& s = *rep.branches[0].series;
    const std::size_t free = s.series.free_constants.size() + 1;  // with x0
    ok = ok && s.consistent_through == kSeriesOrder && free == 3;
    d["right_consistent_through"] = s.consistent_through;
    d["free_constants"] = free;
  } else {
    ok = false;
  }
  d["verdict"] = rep.verdict;
  r.pass = ok;
  r.summary = ok ? "p = -1, resonances and classes as tabulated, right series consistent through order 8" : "failed";
  r.details = d;
  return r;
}

CriterionResult series_coefficients() {
  CriterionResult r{7, "series coefficients F2 and F3"};
  bool ok = true;
  Json d = Json::array();
  for (const auto& c : painleve::check_tabulated_coefficients(kSeriesOrder)) {
    const bool eq = c.equivalence == Equivalence::Equal;
    ok = ok && eq;
    Json row = {{"name", c.name}, {"equivalent", eq}};
    if (!eq) row["difference"] = to_string(c.difference);
    d.push_back(row);
  }
  r.pass = ok;
  r.summary = ok ? "F2 and F3 equal the tabulated relations" : "discrepancy in series coefficients";
  r.details = {{"coefficients", d}};
  return r;
}

CriterionResult conservation_laws() {
  CriterionResult r{8, "conservation laws: multipliers, certificates, divergences, printed pairs"};
  bool ok = true;
  int vectors = 0;
  double worst = 0;
  Json failures = Json::array();
  for (auto mk : kModels) {
    const auto model = models::make_model(mk);
    for (const auto& mu : claws::default_multipliers()) {
      if (!claws::check_multiplier(model, mu.phi)) {
        ok = false;
        failures.push_back({{"model", model.name}, {"multiplier", mu.name}, {"problem", "adjoint not satisfied"}});
      }
      for (const auto& g : claws::catalog_generators(mk)) {
        const auto cv = claws::conserved_vector(model, g, mu);
        const auto div = claws::verify_divergence(mk, cv, kDivergenceGrid);
        ++vectors;
        worst = std::max(worst, div.numeric_max);
        if (!div.symbolic_ok || !(div.numeric_max < kDivergenceTolerance)) {
          ok = false;
          failures.push_back({{"model", model.name}, {"generator", g.label}, {"multiplier", mu.name},
                              {"residual", div.residual}, {"numeric", div.numeric_max}});
        }
      }
    }
  }
  Json pairs = Json::array();
  const claws::Multiplier a0{"A0", Expr::parameter("A0")};
  for (const auto& p : claws::printed_pairs()) {
    const auto model = models::make_model(p.model);
    std::optional<claws::Generator> gen;
    for (const auto& g : claws::catalog_generators(p.model))
      if (g.label == p.label) gen = g;
    if (!gen) {
      ok = false;
      pairs.push_back({{"model", model.name}, {"generator", p.label}, {"verdict", "no generator"}});
      continue;
    }
    const auto cmp = claws::compare_pair(model, claws::conserved_vector(model, *gen, a0), p);
    const bool explained = cmp.kind == claws::MatchKind::Exact || !cmp.detail.empty();
    ok = ok && explained;
    pairs.push_back({{"model", model.name}, {"generator", p.label}, {"verdict", claws::to_string(cmp.kind)},
                     {"detail", cmp.detail}});
  }
  r.pass = ok;
  r.summary = std::to_string(vectors) + " conserved vectors certified, max |div| " + [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", worst);
    return std::string(buf);
  }() + "; " + std::to_string(pairs.size()) + " printed pairs with verdicts";
  r.details = {{"vectors", vectors}, {"failures", failures}, {"printed_pairs", pairs}};
  return r;
}

CriterionResult numerical_oracle() {
  CriterionResult r{9, "numerical oracle: convergence order and phase speed"};
  const numlab::Params p{1, 1, 0};
  const auto ladder = numlab::convergence_ladder(p, 1, {64, 128, 256});
  bool ok = true;
  Json rungs = Json::array();
  for (const auto& rung : ladder.rungs) rungs.push_back({{"nx", rung.Nx}, {"dt", rung.dt}, {"error", rung.error}});
  for (double o : ladder.orders) ok = ok && std::abs(o - kOrderTarget) <= kOrderTolerance;
  numlab::GridSpec g;
  g.Nx = 512;
  g.T = 2 * std::numbers::pi;
  g.frames = 200;
  const Expr u = sin(Expr::independent("x") - Expr::independent("t"));
  const double speed = numlab::crest_speed(numlab::simulate(ModelKind::EulerBernoulli, g, u));
  const double phase_error = std::abs(speed - 1.0);
  ok = ok && phase_error < kPhaseTolerance;
  r.pass = ok;
  char buf[96];
  std::snprintf(buf, sizeof buf, "orders %.3f, %.3f; crest speed error %.2e", ladder.orders.at(0), ladder.orders.at(1),
                phase_error);
  r.summary = buf;
  r.details = {{"rungs", rungs}, {"orders", ladder.orders}, {"crest_speed", speed}, {"phase_error", phase_error}};
  return r;
}

}  // namespace

Json CriterionResult::to_json() const {
  return {{"id", id}, {"title", title}, {"status", pass ? "pass" : "fail"}, {"summary", summary}, {"details", details}};
}

double time_budget(int id) {
  switch (id) {
    case 1: return kBudgetSymmetries;
    case 6: return kBudgetPainleve;
    case 9: return kBudgetLadder;
    default: return 0;
  }
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = symmetries(); break;
      case 2: r = determining(); break;
      case 3: r = reductions(); break;
      case 4: r = travelling_waves(seed); break;
      case 5: r = forced(); break;
      case 6: r = painleve_pipeline(); break;
      case 7: r = series_coefficients(); break;
      case 8: r = conservation_laws(); break;
      case 9: r = numerical_oracle(); break;
      default: throw std::invalid_argument("no criterion " + std::to_string(id));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.summary = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  std::vector<std::future<CriterionResult>> jobs;
  for (int id = 1; id <= 9; ++id) jobs.push_back(std::async(std::launch::async, run_criterion, id, seed));
  std::vector<CriterionResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace beamsym::checks
