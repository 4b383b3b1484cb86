#include "beamsym/claws.hpp"

#include "beamsym/reduce.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <map>

namespace beamsym::claws {

namespace {

const std::vector<std::string> kTX{"t", "x"};

bool is_jet_of(const Expr& a, const std::string& dep) { return a.is_jet() && a.name() == dep; }

// Number of distinct orderings of a multi-index.
long orderings(const std::string& index) {
  std::map<char, int> mult;
  for (char c : index) ++mult[c];
  long n = 1;
  for (std::size_t k = 2; k <= index.size(); ++k) n *= static_cast<long>(k);
  for (const auto& [c, m] : mult)
    for (int k = 2; k <= m; ++k) n /= k;
  return n;
}

// All ordered tuples over {t, x} of the given length.
std::vector<std::string> tuples(std::size_t length) {
  std::vector<std::string> out{""};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (const auto& v : kTX) next.push_back(s + v);
    out = std::move(next);
  }
  return out;
}

jet::SolvedEquation family_equation(const jet::PdeModel& model, const std::string& family) {
  return jet::solve_for(model.linear_operator(family), family, model.solved.leading_index);
}

jet::SolvedEquation adjoint_solved(const jet::PdeModel& model) {
  return jet::solve_for(adjoint_equation(model), kAdjoint, model.solved.leading_index);
}

std::string dependent_of(const Generator& g) { return g.family.empty() ? "u" : g.family; }

SymbolTable printed_symbols(const std::string& family) {
  SymbolTable st;
  st.parameters = {"alpha", "beta", "epsilon"};
  st.independents = kTX;
  st.dependents = {"u", kAdjoint};
  if (!family.empty()) st.dependents.insert(family);
  return st;
}

// Jets of q and of `dep` up to second order, as theta ansatz factors.
std::vector<Expr> low_jets(const std::string& dep) {
  std::vector<Expr> out{Expr::jet(dep)};
  for (const auto& j : jet::multi_indices(kTX, 2)) out.push_back(Expr::jet(dep, j));
  return out;
}

}  // namespace

Expr formal_lagrangian(const jet::PdeModel& model) { return expand(Expr::jet(kAdjoint) * model.equation); }

Expr variational_derivative(const Expr& lagrangian, const std::string& dependent,
                            const std::vector<std::string>& independents) {
  std::vector<std::string> indices{""};
  for (const auto& j : jet::multi_indices(independents, jet::kMaxOrder)) indices.push_back(j);
  std::vector<Expr> terms;
  for (const auto& j : indices) {
    const Expr d = partial(lagrangian, Expr::jet(dependent, j));
    if (d.is_zero()) continue;
    const Expr dj = total_derivative_multi(d, j);
    terms.push_back(j.size() % 2 == 0 ? dj : -dj);
  }
  return expand(add(std::move(terms)));
}

Expr adjoint_equation(const jet::PdeModel& model) {
  return variational_derivative(formal_lagrangian(model), model.dependent, model.independents);
}

Expr substitute_multiplier(const Expr& e, const Expr& phi) {
  return expand(map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
    if (is_jet_of(a, kAdjoint)) return total_derivative_multi(phi, a.index());
    return std::nullopt;
  }));
}

bool check_multiplier(const jet::PdeModel& model, const Expr& phi) {
  return is_zero(model.on_shell().reduce(substitute_multiplier(adjoint_equation(model), phi)));
}

std::vector<Multiplier> default_multipliers() {
  return {{"A0", Expr::parameter("A0")},
          {"A1*u + A2", Expr::parameter("A1") * Expr::jet("u") + Expr::parameter("A2")}};
}

std::vector<Generator> catalog_generators(models::ModelKind kind) {
  const auto cat = models::builtin_catalog(kind, models::SourceKind::None);
  std::vector<Generator> out;
  for (const auto& g : cat.generators) out.push_back({g.label, g.field, ""});
  const std::string label = "Gamma_" + std::to_string(out.size() + 1) + std::string(1, out.front().label.back());
  out.push_back({label, jet::field({}, {{"u", Expr::jet(cat.family_symbol)}}), cat.family_symbol});
  return out;
}

Certificate divergence_certificate(const jet::PdeModel& model, const Expr& ct, const Expr& cx,
                                   const std::string& family) {
  std::vector<jet::SolvedEquation> eqs{model.solved};
  if (!family.empty()) eqs.push_back(family_equation(model, family));
  const jet::OnShell os(eqs, model.independents);
  const Expr div = expand(total_derivative(ct, "t") + total_derivative(cx, "x"));
  const auto d = os.divide(div);
  Certificate c;
  c.cofactors = d.cofactors;
  c.remainder = d.remainder;
  c.ok = is_zero(d.remainder) && is_zero(div - os.combine(d.cofactors));
  return c;
}

ConservedVector conserved_vector(const jet::PdeModel& model, const Generator& generator,
                                 const Multiplier& multiplier) {
  const Expr L = formal_lagrangian(model);
  const std::string& dep = model.dependent;
  Expr W = generator.field.eta_of(dep);
  for (const auto& v : model.independents) W = W - generator.field.xi_of(v) * Expr::jet(dep, v);
  W = expand(W);

  std::map<std::string, Expr> lpart;  // dL/du_J divided by the orderings of J
  auto part = [&](const std::string& idx) -> const Expr& {
    const std::string c = canonical_index(idx);
    auto it = lpart.find(c);
    if (it == lpart.end())
      it = lpart.emplace(c, expand(partial(L, Expr::jet(dep, c)) * Expr(Rational(1, orderings(c))))).first;
    return it->second;
  };

  std::array<Expr, 2> comps;
  for (std::size_t i = 0; i < model.independents.size(); ++i) {
    const std::string& v = model.independents[i];
    std::vector<Expr> terms{generator.field.xi_of(v) * L};
    for (std::size_t m = 0; m + 1 <= static_cast<std::size_t>(jet::kMaxOrder); ++m) {
      for (const auto& T : tuples(m)) {
        std::vector<Expr> inner;
        for (std::size_t r = 0; 1 + m + r <= static_cast<std::size_t>(jet::kMaxOrder); ++r) {
          for (const auto& R : tuples(r)) {
            const Expr& lp = part(v + T + R);
            if (lp.is_zero()) continue;
            const Expr d = total_derivative_multi(lp, R);
            inner.push_back(r % 2 == 0 ? d : -d);
          }
        }
        if (inner.empty()) continue;
        terms.push_back(total_derivative_multi(W, T) * add(std::move(inner)));
      }
    }
    comps[i] = expand(add(std::move(terms)));
  }

  ConservedVector cv;
  cv.model = model.name;
  cv.generator = generator;
  cv.multiplier = multiplier;
  cv.ct_generic = comps[0];
  cv.cx_generic = comps[1];
  cv.ct = substitute_multiplier(comps[0], multiplier.phi);
  cv.cx = substitute_multiplier(comps[1], multiplier.phi);
  cv.certificate = divergence_certificate(model, cv.ct, cv.cx, generator.family);
  return cv;
}

DivergenceReport verify_divergence(models::ModelKind kind, const ConservedVector& cv, int grid) {
  DivergenceReport out;
  out.symbolic_ok = cv.certificate.ok;
  if (!out.symbolic_ok) out.residual = to_string(cv.certificate.remainder);

  const models::ModelParams p{Expr(2), Expr(Rational(1, 2)), Expr(Rational(1, 5))};
  const Expr u = reduce::travelling_wave_solution(kind, p, Expr(1), {Expr(Rational(1, 3)), Expr(Rational(1, 2)), 1, -1})
                     .solution;
  Expr div = expand(total_derivative(cv.ct, "t") + total_derivative(cv.cx, "x"));
  div = jet::insert_solution(div, "u", u);
  if (!cv.generator.family.empty()) {
    const Expr w = reduce::travelling_wave_solution(kind, p, Expr(Rational(1, 2)), {0, 0, 1, Expr(Rational(1, 2))})
                       .solution;
    div = jet::insert_solution(div, cv.generator.family, w);
  }
  div = substitute(div, {{Expr::parameter("alpha"), p.alpha},
                         {Expr::parameter("beta"), p.beta},
                         {Expr::parameter("epsilon"), p.epsilon},
                         {Expr::parameter("A0"), Expr(Rational(13, 10))},
                         {Expr::parameter("A1"), Expr(Rational(7, 10))},
                         {Expr::parameter("A2"), Expr(Rational(-2, 5))}});
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double t = 2.0 * i / (grid - 1), x = 2.0 * j / (grid - 1);
      out.numeric_max = std::max(out.numeric_max, std::abs(eval_numeric(div, {{"t", t}, {"x", x}})));
    }
  return out;
}

std::string to_string(MatchKind m) {
  switch (m) {
    case MatchKind::Exact: return "exact";
    case MatchKind::GaugeEquivalent: return "gauge-equivalent";
    case MatchKind::Discrepancy: return "discrepancy";
  }
  return "?";
}

std::vector<PrintedPair> printed_pairs() {
  using models::ModelKind;
  const std::string E_eb = "(u_tt + alpha*beta*u_xxxx)";
  const std::string E_r = "(alpha*beta*u_xxxx + u_tt - beta*u_ttxx)";
  const std::string E_t = "(alpha*beta*u_xxxx + u_tt - beta*(1 + epsilon)*u_ttxx + epsilon*beta*u_tttt/alpha)";
  return {
      {ModelKind::EulerBernoulli, "Gamma_1a", "u_x*q_t - u_tx*q",
       "q*" + E_eb + " + alpha*beta*u_x*q_xxxx - alpha*beta*u_xx*q_xx + alpha*beta*q_x*u_xxx - u_xxxx*q"},
      {ModelKind::EulerBernoulli, "Gamma_2a", "q*" + E_eb + " + u_t*q_t - u_tt*q",
       "alpha*beta*(u_t*q_xxx - u_tx*q_xx - u_txx*q_x - u_txxx*q)"},
      {ModelKind::EulerBernoulli, "Gamma_3a", "-u*q_t + u_t*q", "alpha*beta*(u_x*q_xx - u*q_xxx + u_xx*q_x + u_xxxx)"},
      {ModelKind::EulerBernoulli, "Gamma_4a",
       "2*t*(q*" + E_eb + ") + q_t*(2*t*u_t + x*u_x) - q*(2*t*u_tt + 2*u_t + x*u_tx)",
       "x*(q*" + E_eb + ") + alpha*beta*q_xxx*(2*t*u_t + x*u_x) - alpha*beta*q_xx*(2*t*u_tx + x*u_xx + u_x)"
       " + alpha*beta*q_x*(2*t*u_txx + x*u_xxx + 2*u_xx) - alpha*beta*q*(2*t*u_txxx + x*u_xxxx + 3*u_xxx)"},
      {ModelKind::EulerBernoulli, "Gamma_5a", "-a*q_t + a_t*q",
       "-alpha*beta*a*q_xxx + alpha*beta*a_x*q_xx - alpha*beta*a_xx*q_x + q*a_xxx"},
      {ModelKind::Rayleigh, "Gamma_1b", "q*" + E_r + " + u_t*q_t - q*u_tt",
       "alpha*beta*(u_t*q_xxx - u_tx*q_xx + u_txx*q_x - u_txxx*q)"},
      {ModelKind::Rayleigh, "Gamma_2b", "u_x*q_t - u_tx*q",
       "q*" + E_r + " + alpha*beta*(u_x*q_xxx - u_xx*q_xx + u_xxx*q_x - q*u_xxxx)"},
      {ModelKind::Rayleigh, "Gamma_3b", "u_t*q - u*q_t", "alpha*beta*(u_x*q_xx - u*q_xxx - u_xx*q_x + u_xxx*q)"},
      {ModelKind::Rayleigh, "Gamma_4b", "b_t*q - b*q_t", "alpha*beta*(b_x*q_xx - b*q_xxx - b_xx*q_x + b_xxx*q)"},
      {ModelKind::Timoshenko, "Gamma_1c",
       "q*" + E_t + " + u_t*(q_t + epsilon*beta*q_ttt/alpha) - u_tt*(q + epsilon*beta*q_tt/alpha)"
       " + u_ttt*epsilon*beta*q_t/alpha - u_tttt*epsilon*beta*q/alpha",
       "alpha*beta*(u_t*q_xxx - u_tx*q_xx + u_txx*q_x - u_txxx*q)"},
      {ModelKind::Timoshenko, "Gamma_2c",
       "u_x*(q_t + q_ttt*epsilon*beta/alpha) - u_tx*(q + q_tt*epsilon*beta/alpha) + u_ttx*q_t*epsilon*beta/alpha"
       " - u_tttx*epsilon*beta/alpha",
       "q*" + E_t + " + alpha*beta*(u_x*q_xxx - u_xx*q_xx + u_xxx*q_x - q*u_xxxx)"},
      {ModelKind::Timoshenko, "Gamma_3c",
       "-u*(q_t + epsilon*beta*q_ttt/alpha) + u_t*(q + epsilon*beta*q_tt/alpha) - u_tt*epsilon*beta*q_t/alpha"
       " + u_ttt*epsilon*beta*q/alpha",
       "alpha*beta*(u_x*q_xx - u*q_xxx - u_xx*q_x + u_xxx*q)"},
      {ModelKind::Timoshenko, "Gamma_4c",
       "-c*(q_t + epsilon*beta*q_ttt/alpha) + c_t*(q + epsilon*beta*q_tt/alpha) - c_tt*epsilon*beta*q_t/alpha"
       " + c_ttt*epsilon*beta*q/alpha",
       "alpha*beta*(c_x*q_xx - c*q_xxx - c_xx*q_x + c_xxx*q)"},
  };
}

PairComparison compare_pair(const jet::PdeModel& model, const ConservedVector& cv, const PrintedPair& printed) {
  const std::string& family = cv.generator.family;
  const SymbolTable st = printed_symbols(family);
  const Expr pt = expand(parse(printed.ct, st));
  const Expr px = expand(parse(printed.cx, st));
  const Expr dt = expand(cv.ct_generic - pt);
  const Expr dx = expand(cv.cx_generic - px);
  PairComparison out;
  if (dt.is_zero() && dx.is_zero()) {
    out.kind = MatchKind::Exact;
    return out;
  }

  std::vector<jet::SolvedEquation> eqs{model.solved, adjoint_solved(model)};
  if (!family.empty()) eqs.push_back(family_equation(model, family));
  const jet::OnShell os(eqs, model.independents);
  const Expr rt = os.reduce(dt), rx = os.reduce(dx);
  if (is_zero(rt) && is_zero(rx)) {
    out.kind = MatchKind::GaugeEquivalent;
    out.detail = "differs by terms vanishing on solutions";
    out.theta = Expr(0);
    return out;
  }

  // theta = sum k_i * m_i over bilinear monomials q_J w_K times 1, t, x.
  std::vector<Expr> unknowns, monomials;
  for (const auto& qj : low_jets(kAdjoint))
    for (const auto& wk : low_jets(dependent_of(cv.generator)))
      for (const Expr& s : {Expr(1), Expr::independent("t"), Expr::independent("x")}) {
        monomials.push_back(qj * wk * s);
        unknowns.push_back(Expr::parameter("k" + std::to_string(unknowns.size())));
      }
  std::vector<Expr> th;
  for (std::size_t i = 0; i < unknowns.size(); ++i) th.push_back(unknowns[i] * monomials[i]);
  const Expr theta = add(std::move(th));
  auto basis = [](const Expr& a) { return a.is_jet() || a.kind() == Kind::Independent; };
  const auto s1 = collect_linear(os.reduce(expand(total_derivative(theta, "x") - dt)), unknowns, basis);
  const auto s2 = collect_linear(os.reduce(expand(total_derivative(theta, "t") + dx)), unknowns, basis);
  const auto rr = row_reduce(stack({s1, s2}), unknowns.size());
  if (rr.consistent()) {
    const auto sol = rr.particular();
    ExprMap sub;
    for (std::size_t i = 0; i < unknowns.size(); ++i) sub[unknowns[i]] = (*sol)[i];
    out.kind = MatchKind::GaugeEquivalent;
    out.theta = expand(substitute(theta, sub));
    out.detail = "differs by a total curl with theta = " + to_string(*out.theta);
    return out;
  }

  out.kind = MatchKind::Discrepancy;
  const auto printed_div = os.reduce(expand(total_derivative(pt, "t") + total_derivative(px, "x")));
  if (!is_zero(printed_div))
    out.detail = "printed pair is not conserved; on solutions D_t c^t + D_x c^x = " + to_string(printed_div) + "; ";
  else
    out.detail = "printed pair is conserved but not curl-equivalent; ";
  out.detail += "derived - printed: c^t: " + to_string(rt) + ", c^x: " + to_string(rx);
  return out;
}

std::string to_json(const ConservedVector& cv, const DivergenceReport& div, const std::optional<PairComparison>& match) {
  nlohmann::ordered_json j;
  j["model"] = cv.model;
  j["generator"] = cv.generator.label;
  j["field"] = cv.generator.field.describe();
  j["phi"] = cv.multiplier.name;
  j["ct"] = to_string(cv.ct);
  j["cx"] = to_string(cv.cx);
  j["lambda"] = nlohmann::ordered_json::array();
  for (const auto& c : cv.certificate.cofactors) {
    nlohmann::ordered_json e;
    e["equation"] = c.equation;
    e["derivative"] = c.index;
    e["cofactor"] = to_string(c.lambda);
    j["lambda"].push_back(std::move(e));
  }
  j["symbolic_ok"] = div.symbolic_ok;
  j["numeric_max_divergence"] = div.numeric_max;
  if (match) {
    j["tabulated_match"] = to_string(match->kind);
    if (!match->detail.empty()) j["tabulated_match_detail"] = match->detail;
  } else {
    j["tabulated_match"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace beamsym::claws
