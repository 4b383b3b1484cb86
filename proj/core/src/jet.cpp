#include "beamsym/jet.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace beamsym::jet {

using nlohmann::json;

// ---- VectorField ---------------------------------------------------------------

Expr VectorField::xi_of(const std::string& v) const {
  auto it = xi.find(v);
  return it == xi.end() ? Expr(0) : it->second;
}

Expr VectorField::eta_of(const std::string& dep) const {
  auto it = eta.find(dep);
  return it == eta.end() ? Expr(0) : it->second;
}

bool VectorField::is_zero() const {
  for (const auto& [k, v] : xi)
    if (!beamsym::is_zero(v)) return false;
  for (const auto& [k, v] : eta)
    if (!beamsym::is_zero(v)) return false;
  return true;
}

VectorField VectorField::normalized() const {
  VectorField out;
  for (const auto& [k, v] : xi) {
    Expr s = simplify(v);
    if (!s.is_zero()) out.xi.emplace(k, s);
  }
  for (const auto& [k, v] : eta) {
    Expr s = simplify(v);
    if (!s.is_zero()) out.eta.emplace(k, s);
  }
  return out;
}

namespace {

template <typename Op>
VectorField combine_fields(const VectorField& a, const VectorField& b, Op op) {
  VectorField out = a;
  for (const auto& [k, v] : b.xi) out.xi[k] = op(a.xi_of(k), v);
  for (const auto& [k, v] : b.eta) out.eta[k] = op(a.eta_of(k), v);
  return out;
}

}  // namespace

VectorField VectorField::operator+(const VectorField& o) const {
  return combine_fields(*this, o, [](const Expr& x, const Expr& y) { return x + y; });
}

VectorField VectorField::operator-(const VectorField& o) const {
  return combine_fields(*this, o, [](const Expr& x, const Expr& y) { return x - y; });
}

VectorField VectorField::operator*(const Expr& k) const {
  VectorField out;
  for (const auto& [n, v] : xi) out.xi[n] = expand(v * k);
  for (const auto& [n, v] : eta) out.eta[n] = expand(v * k);
  return out;
}

std::string VectorField::describe() const {
  std::vector<std::string> pieces;
  auto piece = [&](const Expr& c, const std::string& var) {
    const Expr s = simplify(c);
    if (s.is_zero()) return;
    const std::string d = "d_" + var;
    if (s.is_one()) {
      pieces.push_back(d);
    } else if (s == Expr(-1)) {
      pieces.push_back("-" + d);
    } else if (s.is_sum()) {
      pieces.push_back("(" + to_string(s) + ")*" + d);
    } else {
      pieces.push_back(to_string(s) + "*" + d);
    }
  };
  for (const auto& [k, v] : xi) piece(v, k);
  for (const auto& [k, v] : eta) piece(v, k);
  if (pieces.empty()) return "0";
  std::string out = pieces.front();
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (pieces[i][0] == '-')
      out += " - " + pieces[i].substr(1);
    else
      out += " + " + pieces[i];
  }
  return out;
}

std::string VectorField::to_json() const {
  json j;
  j["xi"] = json::object();
  j["eta"] = json::object();
  for (const auto& [k, v] : xi) j["xi"][k] = to_string(simplify(v));
  for (const auto& [k, v] : eta) j["eta"][k] = to_string(simplify(v));
  return j.dump();
}

VectorField VectorField::from_json(std::string_view text, const SymbolTable& symbols) {
  const json j = json::parse(text);
  VectorField out;
  if (j.contains("xi"))
    for (const auto& [k, v] : j.at("xi").items()) out.xi[k] = parse(v.get<std::string>(), symbols);
  if (j.contains("eta"))
    for (const auto& [k, v] : j.at("eta").items()) out.eta[k] = parse(v.get<std::string>(), symbols);
  return out;
}

bool equal(const VectorField& a, const VectorField& b) { return (a - b).is_zero(); }

VectorField translation(const std::string& v) {
  VectorField f;
  f.xi[v] = Expr(1);
  return f;
}

VectorField field(std::map<std::string, Expr> xi, std::map<std::string, Expr> eta) {
  VectorField f;
  f.xi = std::move(xi);
  f.eta = std::move(eta);
  return f;
}

// ---- prolongation ------------------------------------------------------------------

std::vector<std::string> multi_indices(const std::vector<std::string>& independents, int order) {
  std::vector<std::string> out;
  std::vector<std::string> layer{""};
  for (int k = 1; k <= order; ++k) {
    std::vector<std::string> next;
    for (const auto& J : layer) {
      // extend only with letters not ranked below the last one, so each multiset appears once
      std::size_t start = 0;
      if (!J.empty()) {
        const std::string last(1, J.back());
        start = static_cast<std::size_t>(
            std::find(independents.begin(), independents.end(), last) - independents.begin());
      }
      for (std::size_t i = start; i < independents.size(); ++i) next.push_back(J + independents[i]);
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

ProlongedField prolong(const VectorField& vf, const std::vector<std::string>& independents, const std::string& dependent,
                       int order) {
  if (order > kMaxOrder) throw std::invalid_argument("prolongation order exceeds the jet bound of 4");
  if (order < 0) throw std::invalid_argument("negative prolongation order");
  ProlongedField out;
  out.base = vf;
  out.dependent = dependent;
  out.order = order;
  out.eta[""] = vf.eta_of(dependent);

  // D_i xi^j, reused at every order
  std::map<std::pair<std::string, std::string>, Expr> dxi;
  for (const auto& i : independents)
    for (const auto& j : independents) dxi[{i, j}] = total_derivative(vf.xi_of(j), i);

  for (const auto& idx : multi_indices(independents, order)) {
    const std::string parent = idx.substr(0, idx.size() - 1);
    const std::string i(1, idx.back());
    std::vector<Expr> parts{total_derivative(out.eta.at(parent), i)};
    for (const auto& j : independents) {
      const Expr& d = dxi.at({i, j});
      if (d.is_zero()) continue;
      parts.push_back(-(Expr::jet(dependent, parent + j) * d));
    }
    out.eta[canonical_index(idx)] = expand(add(std::move(parts)));
  }
  return out;
}

Expr apply(const VectorField& vf, const Expr& f) {
  std::vector<Expr> parts;
  for (const auto& [v, c] : vf.xi) parts.push_back(c * partial(f, Expr::independent(v)));
  for (const auto& [d, c] : vf.eta) parts.push_back(c * partial(f, Expr::jet(d)));
  return expand(add(std::move(parts)));
}

Expr insert_solution(const Expr& e, const std::string& dependent, const Expr& solution) {
  return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == dependent) return total_derivative_multi(solution, a.index());
    return std::nullopt;
  });
}

// ---- ranking and solved forms ---------------------------------------------------

namespace {

std::size_t letter_position(char c, const std::vector<std::string>& indeps) {
  for (std::size_t i = 0; i < indeps.size(); ++i)
    if (indeps[i].size() == 1 && indeps[i][0] == c) return i;
  return indeps.size() + static_cast<unsigned char>(c);
}

bool is_dependent_jet(const Expr& a, const std::string& dep) { return a.is_jet() && a.name() == dep; }

std::vector<Expr> jets_of(const Expr& e, const std::string& dep) {
  std::vector<Expr> out;
  for (const auto& a : free_atoms(e))
    if (is_dependent_jet(a, dep)) out.push_back(a);
  return out;
}

}  // namespace

bool jet_ranks_above(const Expr& a, const Expr& b, const std::vector<std::string>& independents) {
  if (a.name() != b.name()) return a.name() > b.name();
  const char first = independents.empty() ? 't' : independents.front()[0];
  const auto ta = std::count(a.index().begin(), a.index().end(), first);
  const auto tb = std::count(b.index().begin(), b.index().end(), first);
  if (ta != tb) return ta > tb;
  if (a.index().size() != b.index().size()) return a.index().size() > b.index().size();
  for (std::size_t i = 0; i < a.index().size(); ++i) {
    const auto pa = letter_position(a.index()[i], independents);
    const auto pb = letter_position(b.index()[i], independents);
    if (pa != pb) return pa < pb;
  }
  return false;
}

SolvedEquation solve_for(const Expr& equation, const std::string& dependent, const std::string& leading_index) {
  SolvedEquation s;
  s.dependent = dependent;
  s.leading_index = canonical_index(leading_index);
  s.equation = expand(equation);
  const Expr L = s.leading_jet();
  s.coefficient = simplify(partial(s.equation, L));
  if (s.coefficient.is_zero()) throw std::invalid_argument("leading jet does not occur in the equation");
  if (contains_atom(s.coefficient, [&](const Expr& a) { return is_dependent_jet(a, dependent); }))
    throw std::invalid_argument("equation is not linear in its leading jet");
  const Expr rest = expand(s.equation - s.coefficient * L);
  s.solved = simplify(-rest * inverse(s.coefficient));
  return s;
}

SolvedEquation solve_for_leading(const Expr& equation, const std::string& dependent,
                                 const std::vector<std::string>& independents) {
  const Expr e = expand(equation);
  auto jets = jets_of(e, dependent);
  std::sort(jets.begin(), jets.end(),
            [&](const Expr& a, const Expr& b) { return jet_ranks_above(a, b, independents); });
  for (const auto& j : jets) {
    const Expr c = simplify(partial(e, j));
    if (c.is_zero()) continue;
    if (contains_atom(c, [&](const Expr& a) { return is_dependent_jet(a, dependent); })) continue;
    return solve_for(e, dependent, j.index());
  }
  throw std::invalid_argument("no jet of '" + dependent + "' can be isolated");
}

// ---- OnShell -------------------------------------------------------------------------

OnShell::OnShell(std::vector<SolvedEquation> equations, std::vector<std::string> independents)
    : eqs_(std::move(equations)), indeps_(std::move(independents)) {}

std::optional<std::pair<std::size_t, std::string>> OnShell::principal(const Expr& jet) const {
  if (!jet.is_jet()) return std::nullopt;
  for (std::size_t k = 0; k < eqs_.size(); ++k) {
    if (eqs_[k].dependent != jet.name()) continue;
    if (auto rest = index_minus(jet.index(), eqs_[k].leading_index)) return std::make_pair(k, *rest);
  }
  return std::nullopt;
}

Expr OnShell::reduce(const Expr& e) const {
  std::unordered_map<Expr, Expr, ExprHash> cache;
  std::function<std::optional<Expr>(const Expr&)> nf = [&](const Expr& a) -> std::optional<Expr> {
    auto p = principal(a);
    if (!p) return std::nullopt;
    if (auto it = cache.find(a); it != cache.end()) return it->second;
    const Expr d = total_derivative_multi(eqs_[p->first].solved, p->second);
    Expr out = expand(map_atoms(d, nf));
    cache.emplace(a, out);
    return out;
  };
  return expand(map_atoms(e, nf));
}

OnShell::Division OnShell::divide(const Expr& e) const {
  Division out;
  std::map<std::pair<std::size_t, std::string>, std::vector<Expr>> lambdas;
  Expr F = expand(e);
  for (int guard = 0; guard < 100000; ++guard) {
    std::optional<Expr> top;
    for (const auto& a : free_atoms(F)) {
      if (!principal(a)) continue;
      if (!top || jet_ranks_above(a, *top, indeps_)) top = a;
    }
    if (!top) break;
    const auto [eq, K] = *principal(*top);
    const SolvedEquation& s = eqs_[eq];
    const Expr DKE = expand(total_derivative_multi(s.equation, K));
    const Expr inv_c = inverse(s.coefficient);
    const Expr J = *top;
    const Expr r = expand(J - DKE * inv_c);

    std::map<long, std::vector<Expr>> parts;
    for (const auto& term : terms_of(F)) {
      long k = 0;
      for (const auto& [base, q] : factors_of(term)) {
        if (base == J) {
          if (!q.is_integer() || q.is_negative()) throw std::runtime_error("expression is not polynomial in " + to_string(J));
          k = q.to_long();
        } else if (contains(base, J)) {
          throw std::runtime_error("expression is not polynomial in " + to_string(J));
        }
      }
      parts[k].push_back(k == 0 ? term : term * pow(J, Rational(-k)));
    }
    std::vector<Expr> next;
    std::vector<Expr> lam;
    for (auto& [k, fs] : parts) {
      const Expr fk = add(std::move(fs));
      next.push_back(fk * pow(r, Rational(k)));
      for (long i = 0; i < k; ++i) lam.push_back(fk * pow(J, Rational(i)) * pow(r, Rational(k - 1 - i)) * inv_c);
    }
    for (auto& l : lam) lambdas[{eq, K}].push_back(std::move(l));
    F = expand(add(std::move(next)));
  }
  out.remainder = F;
  for (auto& [key, parts] : lambdas) {
    Expr l = expand(add(std::move(parts)));
    if (!l.is_zero()) out.cofactors.push_back({key.first, key.second, l});
  }
  return out;
}

Expr OnShell::combine(const std::vector<Cofactor>& cofactors) const {
  std::vector<Expr> parts;
  for (const auto& c : cofactors) parts.push_back(c.lambda * total_derivative_multi(eqs_[c.equation].equation, c.index));
  return expand(add(std::move(parts)));
}

// ---- PdeModel ------------------------------------------------------------------------

SymbolTable PdeModel::symbols() const {
  SymbolTable s;
  for (const auto& p : parameters) s.parameters.insert(p.name);
  s.independents = independents;
  s.dependents = {dependent};
  s.functions = functions;
  return s;
}

int PdeModel::order() const {
  int k = 0;
  for (const auto& j : jets_of(equation, dependent)) k = std::max(k, static_cast<int>(j.index().size()));
  return k;
}

OnShell PdeModel::on_shell() const { return OnShell({solved}, independents); }

bool PdeModel::affine() const {
  for (const auto& term : terms_of(expand(equation))) {
    Rational degree(0);
    for (const auto& [base, k] : factors_of(term)) {
      if (is_dependent_jet(base, dependent)) {
        degree += k;
      } else if (contains_atom(base, [&](const Expr& a) { return is_dependent_jet(a, dependent); })) {
        return false;
      }
    }
    if (degree > Rational(1) || (!degree.is_integer())) return false;
  }
  return true;
}

Expr PdeModel::linear_operator(const std::string& other) const {
  if (!affine()) throw std::logic_error("model is not affine in " + dependent);
  const Expr renamed = map_atoms(equation, [&](const Expr& a) -> std::optional<Expr> {
    if (is_dependent_jet(a, dependent)) return Expr::jet(other, a.index());
    return std::nullopt;
  });
  const Expr at_zero = map_atoms(equation, [&](const Expr& a) -> std::optional<Expr> {
    if (is_dependent_jet(a, dependent)) return Expr(0);
    return std::nullopt;
  });
  return expand(renamed - at_zero);
}

bool PdeModel::known_nonzero(const Expr& e) const {
  if (e.is_constant()) return !e.is_zero();
  for (const auto& [base, k] : factors_of(e)) {
    if (base.kind() != Kind::Parameter) return false;
    const auto it = std::find_if(parameters.begin(), parameters.end(),
                                 [&](const ModelParameter& p) { return p.name == base.name(); });
    if (it == parameters.end() || !(it->positive || it->nonzero)) return false;
  }
  return true;
}

PdeModel make_pde(std::string name, const Expr& equation, std::vector<ModelParameter> parameters, const Expr& source,
                  std::set<std::string> functions) {
  PdeModel m;
  m.name = std::move(name);
  m.parameters = std::move(parameters);
  m.functions = std::move(functions);
  m.equation = expand(equation);
  m.source = source;
  m.solved = solve_for_leading(m.equation, m.dependent, m.independents);
  return m;
}

PdeModel specialize(const PdeModel& model, const std::string& parameter, const Expr& value) {
  PdeModel m = model;
  const Expr p = Expr::parameter(parameter);
  m.equation = expand(substitute(model.equation, p, value));
  m.source = substitute(model.source, p, value);
  m.solved = solve_for(m.equation, m.dependent, model.solved.leading_index);
  if (m.collection_substitution) {
    auto [target, repl] = *m.collection_substitution;
    repl = substitute(repl, p, value);
    if (value.is_zero() || !contains_atom(m.equation, [](const Expr& a) { return a.is_function(); }))
      m.collection_substitution.reset();
    else
      m.collection_substitution = std::make_pair(target, repl);
  }
  // Drops the substituted parameter from the declarations.
  m.parameters.erase(std::remove_if(m.parameters.begin(), m.parameters.end(),
                                    [&](const ModelParameter& q) { return q.name == parameter; }),
                     m.parameters.end());
  return m;
}

// ---- symmetry condition ------------------------------------------------------------

Expr symmetry_condition(const VectorField& vf, const PdeModel& model) {
  const Expr& E = model.equation;
  const int order = model.order();
  const ProlongedField pf = prolong(vf, model.independents, model.dependent, order);
  std::vector<Expr> parts;
  for (const auto& v : model.independents) {
    const Expr c = vf.xi_of(v);
    if (c.is_zero()) continue;
    parts.push_back(c * partial(E, Expr::independent(v)));
  }
  for (const auto& j : jets_of(E, model.dependent)) {
    const Expr& eta = pf.eta.at(j.index());
    if (eta.is_zero()) continue;
    parts.push_back(eta * partial(E, j));
  }
  return expand(add(std::move(parts)));
}

Expr symmetry_residual(const VectorField& vf, const PdeModel& model) {
  return model.on_shell().reduce(symmetry_condition(vf, model));
}

VectorField commutator(const VectorField& a, const VectorField& b) {
  VectorField out;
  std::set<std::string> xs, us;
  for (const auto& [k, v] : a.xi) xs.insert(k);
  for (const auto& [k, v] : b.xi) xs.insert(k);
  for (const auto& [k, v] : a.eta) us.insert(k);
  for (const auto& [k, v] : b.eta) us.insert(k);
  for (const auto& k : xs) {
    Expr c = expand(apply(a, b.xi_of(k)) - apply(b, a.xi_of(k)));
    if (!c.is_zero()) out.xi[k] = c;
  }
  for (const auto& k : us) {
    Expr c = expand(apply(a, b.eta_of(k)) - apply(b, a.eta_of(k)));
    if (!c.is_zero()) out.eta[k] = c;
  }
  return out;
}

bool is_superposition_member(const VectorField& vf, const PdeModel& model) {
  for (const auto& [k, v] : vf.xi)
    if (!is_zero(v)) return false;
  const Expr w = vf.eta_of(model.dependent);
  if (contains_atom(w, [](const Expr& a) { return a.is_jet(); })) return false;
  if (!model.affine()) return is_zero(w);
  const Expr op = model.linear_operator("w__");
  const Expr applied = map_atoms(op, [&](const Expr& a) -> std::optional<Expr> {
    if (is_dependent_jet(a, "w__")) return total_derivative_multi(w, a.index());
    return std::nullopt;
  });
  return is_zero(applied);
}

namespace {

bool involves_coordinates(const Expr& f) {
  return contains_atom(f, [](const Expr& a) { return a.kind() == Kind::Independent || a.is_jet(); });
}

}  // namespace

SpanResult span_contains(const std::vector<VectorField>& basis, const VectorField& vf, const PdeModel& model) {
  SpanResult out;
  std::vector<Expr> unknowns;
  for (std::size_t i = 0; i < basis.size(); ++i) unknowns.push_back(Expr::parameter("span__" + std::to_string(i)));
  VectorField diff = vf;
  for (std::size_t i = 0; i < basis.size(); ++i) diff = diff - basis[i] * unknowns[i];

  std::vector<CollectedSystem> systems;
  std::set<std::string> xs;
  for (const auto& v : model.independents) xs.insert(v);
  for (const auto& [k, v] : diff.xi) xs.insert(k);
  for (const auto& k : xs) systems.push_back(collect_linear(diff.xi_of(k), unknowns, involves_coordinates));
  const Expr u = Expr::jet(model.dependent);
  systems.push_back(collect_linear(partial(diff.eta_of(model.dependent), u), unknowns, involves_coordinates));

  Matrix m = stack(systems);
  if (unknowns.empty()) {
    bool ok = true;
    for (const auto& row : m) ok = ok && is_zero(row.back());
    if (!ok) return out;
  } else {
    const RowReduction rr =
        row_reduce(std::move(m), unknowns.size(), [&](const Expr& e) { return model.known_nonzero(e); });
    auto sol = rr.particular();
    if (!sol) return out;
    out.coefficients = *sol;
  }
  VectorField rem = vf;
  for (std::size_t i = 0; i < basis.size(); ++i) rem = rem - basis[i] * out.coefficients[i];
  rem = rem.normalized();
  out.remainder = rem;
  out.member = rem.is_zero() || is_superposition_member(rem, model);
  return out;
}

// ---- determining equations -------------------------------------------------------------

namespace {

struct Ansatz {
  std::vector<Expr> unknowns;
  std::size_t w_count = 0;
  std::size_t c0 = 0;
  VectorField field;
};

Ansatz build_ansatz(const PdeModel& model, int degree) {
  Ansatz a;
  const Expr t = Expr::independent(model.independents.at(0));
  const Expr x = Expr::independent(model.independents.at(1));
  std::vector<std::pair<int, int>> monomials;
  for (int total = 0; total <= degree; ++total)
    for (int i = total; i >= 0; --i) monomials.emplace_back(i, total - i);
  auto mono = [&](int i, int j) { return pow(t, Rational(i)) * pow(x, Rational(j)); };

  std::vector<Expr> w_terms, t_terms, x_terms;
  for (auto [i, j] : monomials) {
    Expr k = Expr::parameter("Kw" + std::to_string(i) + std::to_string(j));
    a.unknowns.push_back(k);
    w_terms.push_back(k * mono(i, j));
  }
  a.w_count = a.unknowns.size();
  const Expr c0 = Expr::parameter("Ku");
  a.c0 = a.unknowns.size();
  a.unknowns.push_back(c0);
  for (auto [i, j] : monomials) {
    Expr k = Expr::parameter("Kt" + std::to_string(i) + std::to_string(j));
    a.unknowns.push_back(k);
    t_terms.push_back(k * mono(i, j));
  }
  for (auto [i, j] : monomials) {
    Expr k = Expr::parameter("Kx" + std::to_string(i) + std::to_string(j));
    a.unknowns.push_back(k);
    x_terms.push_back(k * mono(i, j));
  }
  a.field.xi[model.independents[0]] = add(t_terms);
  a.field.xi[model.independents[1]] = add(x_terms);
  a.field.eta[model.dependent] = c0 * Expr::jet(model.dependent) + add(w_terms);
  return a;
}

std::string to_condition(const Expr& p, const Expr& value) { return to_string(p) + " = " + to_string(value); }

// Solves `e` = 0 for a parameter it contains linearly.
std::optional<std::pair<std::string, Expr>> solve_linear_parameter(const Expr& e, const PdeModel& model) {
  const Expr num = together(e).first;
  for (const auto& p : model.parameters) {
    const Expr s = Expr::parameter(p.name);
    if (!contains(num, s)) continue;
    const Expr a = simplify(partial(num, s));
    if (a.is_zero() || contains(a, s)) continue;
    const Expr b = expand(num - a * s);
    const Expr value = simplify(-b * inverse(a));
    if (p.nonzero && value.is_zero()) continue;
    if (value.is_constant() &&
        std::find(p.excluded.begin(), p.excluded.end(), value.value()) != p.excluded.end())
      continue;
    if (p.positive && value.is_constant() && !(value.value() > Rational(0))) continue;
    return std::make_pair(p.name, value);
  }
  return std::nullopt;
}

DeterminingBranch solve_branch(const PdeModel& model, const Ansatz& ansatz, const Matrix& matrix,
                               std::string condition, std::vector<Expr>* assumptions_out) {
  DeterminingBranch br;
  br.condition = std::move(condition);
  br.superposition_family = model.affine();
  const RowReduction rr =
      row_reduce(matrix, ansatz.unknowns.size(), [&](const Expr& e) { return model.known_nonzero(e); });
  for (const auto& a : rr.nonzero_assumptions) br.assumptions.push_back(to_string(a) + " != 0");
  if (assumptions_out) *assumptions_out = rr.nonzero_assumptions;

  for (const auto& v : rr.nullspace()) {
    ExprMap values;
    for (std::size_t j = 0; j < ansatz.unknowns.size(); ++j) values.emplace(ansatz.unknowns[j], v[j]);
    VectorField f;
    for (const auto& [k, c] : ansatz.field.xi) f.xi[k] = substitute(c, values);
    for (const auto& [k, c] : ansatz.field.eta) f.eta[k] = substitute(c, values);
    f = f.normalized();
    bool pure_w = true;
    for (const auto& [k, c] : f.xi) pure_w = pure_w && c.is_zero();
    pure_w = pure_w && v[ansatz.c0].is_zero();
    if (pure_w) {
      ++br.superposition_modes;
    } else {
      br.basis.push_back(f);
    }
  }
  return br;
}

Matrix determining_matrix(const PdeModel& model, const Ansatz& ansatz, std::size_t* equations) {
  Expr residual = symmetry_residual(ansatz.field, model);
  if (model.collection_substitution) {
    residual = expand(substitute(residual, model.collection_substitution->first, model.collection_substitution->second));
  }
  const CollectedSystem sys = collect_linear(residual, ansatz.unknowns, involves_coordinates);
  if (equations) *equations = sys.rows.size();
  return sys.rows;
}

}  // namespace

DeterminingResult solve_determining(const PdeModel& model, const AnsatzSpec& spec) {
  DeterminingResult out;
  out.degree = spec.degree;
  const Ansatz ansatz = build_ansatz(model, spec.degree);
  out.unknowns = ansatz.unknowns.size();
  const Matrix matrix = determining_matrix(model, ansatz, &out.equations);
  std::vector<Expr> assumptions;
  out.generic = solve_branch(model, ansatz, matrix, "generic", &assumptions);

  std::set<std::string> seen;
  for (const auto& a : assumptions) {
    auto sol = solve_linear_parameter(a, model);
    if (!sol) continue;
    const std::string cond = to_condition(Expr::parameter(sol->first), sol->second);
    if (!seen.insert(cond).second) continue;
    const PdeModel special = specialize(model, sol->first, sol->second);
    const Matrix m = determining_matrix(special, ansatz, nullptr);
    out.splits.push_back(solve_branch(special, ansatz, m, cond, nullptr));
  }
  return out;
}

StructureTable structure_constants(const std::vector<VectorField>& basis, const PdeModel& model) {
  StructureTable t;
  const std::size_t n = basis.size();
  t.constants.assign(n, std::vector<std::optional<std::vector<Expr>>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    t.constants[i][i] = std::vector<Expr>(n, Expr(0));
    for (std::size_t j = i + 1; j < n; ++j) {
      const SpanResult s = span_contains(basis, commutator(basis[i], basis[j]), model);
      if (!s.member) {
        t.closed = false;
        continue;
      }
      t.constants[i][j] = s.coefficients;
      std::vector<Expr> neg;
      for (const auto& c : s.coefficients) neg.push_back(-c);
      t.constants[j][i] = neg;
    }
  }
  return t;
}

}  // namespace beamsym::jet
