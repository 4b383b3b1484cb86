#include "beamsym/painleve.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace beamsym::painleve {

namespace {

using Poly = std::vector<Rational>;  // constant term first

const Expr kZ = Expr::parameter("z");

// Falling factorial q (q-1) ... (q-j+1).
Rational falling(const Rational& q, int j) {
  Rational r(1);
  for (int i = 0; i < j; ++i) r *= q - Rational(i);
  return r;
}

// Falling factorial of (q + s) as a polynomial in s.
Poly falling_poly(const Rational& q, int j) {
  Poly out{Rational(1)};
  for (int i = 0; i < j; ++i) {
    Poly next(out.size() + 1, Rational(0));
    const Rational c = q - Rational(i);
    for (std::size_t k = 0; k < out.size(); ++k) {
      next[k] += out[k] * c;
      next[k + 1] += out[k];
    }
    out = std::move(next);
  }
  return out;
}

Poly trim(Poly p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  return p;
}

Rational evaluate(const Poly& p, const Rational& x) {
  Rational r(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

// Divides by (x - r); the remainder is assumed zero.
Poly deflate(const Poly& p, const Rational& r) {
  Poly q(p.size() - 1, Rational(0));
  Rational carry(0);
  for (std::size_t k = p.size() - 1; k-- > 0;) {
    carry = p[k + 1] + carry * r;
    q[k] = carry;
  }
  return q;
}

std::vector<mpz_class> divisors(mpz_class n) {
  if (n < 0) n = -n;
  std::vector<mpz_class> out;
  for (mpz_class d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    if (d * d != n) out.push_back(n / d);
  }
  return out;
}

// Coefficients of nonnegative integer powers of `sym` in the expansion of e.
std::vector<Expr> coefficients_in(const Expr& e, const Expr& sym) {
  std::vector<std::vector<Expr>> parts;
  for (const auto& term : terms_of(expand(e))) {
    long k = 0;
    std::vector<Expr> rest;
    for (const auto& [base, q] : factors_of(term)) {
      if (base == sym) {
        if (!q.is_integer() || q.is_negative()) throw PainleveError("not polynomial in " + to_string(sym));
        k = q.to_long();
      } else {
        rest.push_back(pow(base, q));
      }
    }
    if (parts.size() <= static_cast<std::size_t>(k)) parts.resize(k + 1);
    parts[k].push_back(mul(std::move(rest)) * Expr(split_coefficient(term).first));
  }
  std::vector<Expr> out;
  for (auto& p : parts) out.push_back(add(std::move(p)));
  return out;
}

// Rational coefficients of a polynomial with Expr coefficients, divided by its leading coefficient.
std::pair<Poly, Expr> normalize(const std::vector<Expr>& c) {
  std::size_t top = c.size();
  while (top > 0 && is_zero(c[top - 1])) --top;
  if (top == 0) return {{}, Expr(0)};
  const Expr lead = c[top - 1];
  Poly out;
  for (std::size_t k = 0; k < top; ++k) {
    const Expr r = simplify(c[k] * inverse(lead));
    if (!r.is_constant()) throw PainleveError("coefficient ratio " + to_string(r) + " depends on parameters");
    out.push_back(r.value());
  }
  return {out, lead};
}

Expr poly_expr(const std::vector<Expr>& c, const Expr& sym) {
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < c.size(); ++k) terms.push_back(c[k] * pow(sym, Rational(static_cast<long>(k))));
  return add(std::move(terms));
}

struct Group {
  std::vector<int> counts;
  Expr at_x0;                 // coefficient evaluated at x = x0
  std::vector<Expr> z_coeffs; // coefficient expanded in z = x - x0
  int degree = 0;             // total degree in y and its derivatives
  int weight = 0;             // total derivative order
  Rational exponent(const Rational& p) const { return p * Rational(degree) - Rational(weight); }
};

std::vector<Group> make_groups(const PolynomialOde& ode) {
  const Expr x = Expr::independent(ode.independent);
  std::vector<Group> out;
  for (const auto& [counts, coeff] : ode.groups) {
    Group g;
    g.counts = counts;
    g.at_x0 = expand(substitute(coeff, x, ode.expansion_point));
    g.z_coeffs = coefficients_in(substitute(coeff, x, kZ + ode.expansion_point), kZ);
    for (std::size_t j = 0; j < counts.size(); ++j) {
      g.degree += counts[j];
      g.weight += counts[j] * static_cast<int>(j);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<const Group*> dominant(const std::vector<Group>& groups, const Rational& p) {
  std::optional<Rational> low;
  for (const auto& g : groups) {
    const Rational e = g.exponent(p);
    if (!low || e < *low) low = e;
  }
  std::vector<const Group*> out;
  for (const auto& g : groups)
    if (g.exponent(p) == *low) out.push_back(&g);
  return out;
}

// Truncated Laurent series sum_k c[k] z^(low + k).
struct Series {
  Rational low;
  std::vector<Expr> c;
};

Series multiply(const Series& a, const Series& b, std::size_t length) {
  Series out{a.low + b.low, std::vector<Expr>(length)};
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i <= k && i < a.c.size(); ++i)
      if (k - i < b.c.size() && !a.c[i].is_zero() && !b.c[k - i].is_zero()) terms.push_back(a.c[i] * b.c[k - i]);
    out.c[k] = expand(add(std::move(terms)));
  }
  return out;
}

// Coefficients of the ODE residual at z^(exponent + k), k = 0..length-1.
std::vector<Expr> residual_series(const std::vector<Group>& groups, const Rational& p, const Rational& exponent,
                                  const std::vector<Expr>& coeffs, std::size_t length) {
  const int order = groups.empty() ? 0 : static_cast<int>(groups.front().counts.size()) - 1;
  std::vector<Series> derivs;
  for (int j = 0; j <= order; ++j) {
    Series d{p - Rational(j), {}};
    for (std::size_t k = 0; k < length && k < coeffs.size(); ++k)
      d.c.push_back(expand(coeffs[k] * Expr(falling(p + Rational(static_cast<long>(k)), j))));
    derivs.push_back(std::move(d));
  }
  std::vector<std::vector<Expr>> acc(length);
  for (const auto& g : groups) {
    Series prod{Rational(0), g.z_coeffs};
    if (prod.c.size() > length) prod.c.resize(length);
    for (std::size_t j = 0; j < g.counts.size(); ++j)
      for (int m = 0; m < g.counts[j]; ++m) prod = multiply(prod, derivs[j], length);
    const Rational offset = prod.low - exponent;
    if (!offset.is_integer() || offset.is_negative()) throw PainleveError("series offsets are not integral");
    const long o = offset.to_long();
    for (std::size_t k = 0; k + o < length && k < prod.c.size(); ++k) acc[k + o].push_back(prod.c[k]);
  }
  std::vector<Expr> out;
  for (auto& a : acc) out.push_back(expand(add(std::move(a))));
  return out;
}

nlohmann::ordered_json rational_json(const Rational& r) {
  if (r.fits_long()) return r.to_long();
  return r.str();
}

Expr rename_ode(const Expr& e, const std::string& indep, const std::string& dep) {
  return map_atoms(e, [&](const Expr& a) -> std::optional<Expr> {
    if (a.is_jet() && a.name() == dep) return Expr::jet("y", std::string(a.index().size(), 'x'));
    if (a.kind() == Kind::Independent && a.name() == indep) return Expr::independent("x");
    return std::nullopt;
  });
}

}  // namespace

// ---- polynomial form -------------------------------------------------------------------

Expr PolynomialOde::equation() const {
  std::vector<Expr> terms;
  for (const auto& [counts, coeff] : groups) {
    Expr t = coeff;
    for (std::size_t j = 0; j < counts.size(); ++j)
      if (counts[j] > 0) t = t * pow(Expr::jet(dependent, std::string(j, independent.at(0))), Rational(counts[j]));
    terms.push_back(t);
  }
  return expand(add(std::move(terms)));
}

PolynomialOde to_polynomial(const reduce::OdeModel& ode) {
  PolynomialOde out;
  out.independent = ode.independent;
  out.dependent = ode.dependent;
  out.order = ode.order();
  const Expr x = Expr::independent(ode.independent);
  Expr num = expand(together(ode.equation).first);

  std::optional<Rational> low;
  for (const auto& t : terms_of(num)) {
    Rational k(0);
    for (const auto& [base, q] : factors_of(t))
      if (base == x) k = q;
    if (!low || k < *low) low = k;
  }
  if (low && !low->is_zero()) num = expand(num * pow(x, -*low));

  std::map<std::vector<int>, std::vector<Expr>> parts;
  for (const auto& term : terms_of(num)) {
    std::vector<int> counts(out.order + 1, 0);
    std::vector<Expr> coeff{Expr(split_coefficient(term).first)};
    for (const auto& [base, q] : factors_of(term)) {
      const bool dep = base.is_jet() && base.name() == ode.dependent;
      if (dep || base == x) {
        if (!q.is_integer() || q.is_negative()) throw PainleveError("equation is not polynomial: " + to_string(term));
        if (dep) {
          counts[base.index().size()] += static_cast<int>(q.to_long());
          continue;
        }
      } else if (contains_atom(base, [&](const Expr& a) { return a == x || (a.is_jet() && a.name() == ode.dependent); })) {
        throw PainleveError("equation is not polynomial: " + to_string(term));
      }
      coeff.push_back(pow(base, q));
    }
    parts[counts].push_back(mul(std::move(coeff)));
  }
  for (auto& [k, v] : parts) {
    Expr c = expand(add(std::move(v)));
    if (!c.is_zero()) out.groups.emplace(k, c);
  }
  return out;
}

// ---- rational roots ------------------------------------------------------------------

RationalRoots rational_roots(std::vector<Rational> p) {
  RationalRoots out;
  p = trim(std::move(p));
  while (p.size() > 1 && p.front().is_zero()) {
    out.roots.push_back(Rational(0));
    p.erase(p.begin());
  }
  bool found = true;
  while (p.size() > 1 && found) {
    found = false;
    if (p.size() == 2) {
      out.roots.push_back(-p[0] / p[1]);
      p = {p[1]};
      break;
    }
    // Clear denominators for the rational root theorem.
    mpz_class l = 1;
    for (const auto& c : p) l = lcm(l, c.den());
    const mpz_class c0 = (p.front() * Rational(l)).num();
    const mpz_class cn = (p.back() * Rational(l)).num();
    for (const auto& a : divisors(c0)) {
      for (const auto& b : divisors(cn)) {
        for (int sign : {1, -1}) {
          const Rational r(mpz_class(sign * a), b);
          if (evaluate(p, r).is_zero()) {
            out.roots.push_back(r);
            p = deflate(p, r);
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
  }
  if (p.size() > 1) out.remainder = p;
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

// ---- balances and resonances ------------------------------------------------------------

std::vector<Balance> dominant_balance(const PolynomialOde& ode, bool include_nonpole) {
  const auto groups = make_groups(ode);
  std::set<Rational> candidates;
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j)
      if (groups[i].degree != groups[j].degree)
        candidates.insert(Rational(groups[i].weight - groups[j].weight) / Rational(groups[i].degree - groups[j].degree));

  const Expr a = Expr::parameter("a");
  std::vector<Balance> out;
  for (const auto& p : candidates) {
    if (!include_nonpole && !p.is_negative()) continue;
    const auto dom = dominant(groups, p);
    std::set<int> degrees;
    for (const auto* g : dom) degrees.insert(g->degree);
    if (degrees.size() < 2) continue;
    std::vector<Expr> coeff(static_cast<std::size_t>(*degrees.rbegin()) + 1);
    for (const auto* g : dom) {
      Rational w(1);
      for (std::size_t j = 0; j < g->counts.size(); ++j) w *= falling(p, static_cast<int>(j)).pow(g->counts[j]);
      coeff[g->degree] = coeff[g->degree] + g->at_x0 * Expr(w);
    }
    const auto [norm, lead] = normalize(coeff);
    if (norm.size() < 2) continue;
    Balance b;
    b.p = p;
    b.exponent = dom.front()->exponent(p);
    b.polynomial = poly_expr(coeff, a);
    b.content = lead;
    b.roots = rational_roots(norm);
    for (const auto& r : b.roots.roots)
      if (!r.is_zero() && std::find(b.retained.begin(), b.retained.end(), r) == b.retained.end()) b.retained.push_back(r);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

std::vector<Expr> resonance_coefficients(const std::vector<Group>& groups, const Rational& p, const Rational& a) {
  std::vector<Expr> out;
  for (const auto* g : dominant(groups, p)) {
    for (std::size_t j = 0; j < g->counts.size(); ++j) {
      if (g->counts[j] == 0) continue;
      // d/dm of prod_k (a ff(p,k))^(n_k) with y^(j) perturbed.
      Rational w(g->counts[j]);
      for (std::size_t k = 0; k < g->counts.size(); ++k) {
        const long n = g->counts[k] - (k == j ? 1 : 0);
        w *= (a * falling(p, static_cast<int>(k))).pow(n);
      }
      const Poly f = falling_poly(p, static_cast<int>(j));
      if (out.size() < f.size()) out.resize(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) out[i] = out[i] + g->at_x0 * Expr(w * f[i]);
    }
  }
  for (auto& c : out) c = expand(c);
  return out;
}

}  // namespace

Resonances resonances(const PolynomialOde& ode, const Rational& p, const Rational& a) {
  const auto coeff = resonance_coefficients(make_groups(ode), p, a);
  Resonances out;
  out.polynomial = poly_expr(coeff, Expr::parameter("s"));
  const auto [norm, lead] = normalize(coeff);
  out.roots = rational_roots(norm);
  return out;
}

std::string to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::Right: return "Right";
    case SeriesClass::Left: return "Left";
    case SeriesClass::Mixed: return "Mixed";
  }
  return "?";
}

SeriesClass classify_series(const std::vector<Rational>& roots) {
  const auto minus_one = std::count(roots.begin(), roots.end(), Rational(-1));
  if (minus_one == 0) throw PainleveError("test fails: resonance -1 missing");
  if (minus_one > 1) throw PainleveError("test fails: resonance -1 not simple");
  bool neg = false, pos = false;
  for (const auto& r : roots) {
    if (r == Rational(-1)) continue;
    if (r.is_negative()) neg = true;
    if (r.sign() > 0) pos = true;
  }
  if (neg && pos) return SeriesClass::Mixed;
  return neg ? SeriesClass::Left : SeriesClass::Right;
}

// ---- series -----------------------------------------------------------------------------

Expr LaurentSeries::to_expr(const Expr& z) const {
  std::vector<Expr> terms;
  for (std::size_t k = 0; k < coefficients.size(); ++k)
    terms.push_back(coefficients[k] * pow(z, p + Rational(static_cast<long>(k))));
  return add(std::move(terms));
}

SeriesResult build_series(const PolynomialOde& ode, const Rational& p, const Rational& a, int order) {
  if (!p.is_integer()) throw PainleveError("non-integer leading exponent " + p.str());
  const auto groups = make_groups(ode);
  const auto q = resonance_coefficients(groups, p, a);
  const Rational exponent = dominant(groups, p).front()->exponent(p);
  auto q_at = [&](long k) {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < q.size(); ++i) terms.push_back(q[i] * Expr(Rational(k).pow(static_cast<long>(i))));
    return expand(add(std::move(terms)));
  };

  SeriesResult out;
  out.series.x0 = ode.expansion_point;
  out.series.p = p;
  out.series.order = order;
  std::vector<Expr>& c = out.series.coefficients;
  c.push_back(Expr(a));
  for (long k = 1; k <= order; ++k) {
    c.push_back(Expr(0));
    const Expr stuff = residual_series(groups, p, exponent, c, static_cast<std::size_t>(k) + 1).back();
    const Expr lin = q_at(k);
    if (is_zero(lin)) {
      out.resonance_orders.push_back(static_cast<int>(k));
      if (!is_zero(stuff)) {
        out.failed_resonance = static_cast<int>(k);
        c.pop_back();
        break;
      }
      c.back() = Expr::parameter("F" + std::to_string(k - 1));
      out.series.free_constants.push_back(c.back());
    } else {
      c.back() = expand(-stuff * inverse(lin));
    }
  }
  out.residuals = residual_series(groups, p, exponent, c, c.size());
  out.consistent_through = -1;
  for (std::size_t k = 0; k < out.residuals.size(); ++k) {
    if (!is_zero(out.residuals[k])) break;
    out.consistent_through = static_cast<int>(k);
  }
  return out;
}

// ---- full test ----------------------------------------------------------------------------

ResonanceReport painleve_test(const reduce::OdeModel& ode, int order) { return painleve_test(to_polynomial(ode), order); }

ResonanceReport painleve_test(const PolynomialOde& ode, int order) {
  ResonanceReport out;
  out.balances = dominant_balance(ode);
  if (out.balances.empty()) {
    out.verdict = "no movable pole: test inconclusive";
    return out;
  }
  std::optional<std::string> failure;
  for (const auto& b : out.balances) {
    if (!b.p.is_integer()) {
      out.flags.push_back("p = " + b.p.str() + ": non-integer leading exponent, weak Painleve / fails strong test");
      if (!failure) failure = "weak Painleve / fails strong test";
    }
    if (!b.roots.complete()) {
      out.flags.push_back("p = " + b.p.str() + ": leading coefficients include non-rational roots");
      if (!failure) failure = "weak Painleve / non-rational leading coefficient";
    }
    for (const auto& a : b.retained) {
      BalanceReport br;
      br.p = b.p;
      br.a = a;
      const auto res = resonances(ode, b.p, a);
      br.resonances = res.roots.roots;
      br.rational_resonances = res.roots.complete();
      if (!br.rational_resonances) {
        br.status = "non-rational resonances (weak Painleve)";
        if (!failure) failure = "weak Painleve: non-rational resonances";
        out.branches.push_back(std::move(br));
        continue;
      }
      try {
        br.series_class = classify_series(br.resonances);
      } catch (const PainleveError& e) {
        br.status = e.what();
        if (!failure) failure = e.what();
        out.branches.push_back(std::move(br));
        continue;
      }
      if (*br.series_class == SeriesClass::Right && b.p.is_integer()) {
        const Rational top = br.resonances.back();
        if (Rational(order) < top + Rational(2))
          throw PainleveError("truncation order " + std::to_string(order) + " below max resonance + 2");
        br.series = build_series(ode, b.p, a, order);
        if (br.series->failed_resonance) {
          br.status = "fails Painleve test at resonance " + std::to_string(*br.series->failed_resonance);
          if (!failure) failure = br.status;
        } else if (br.series->consistent_through < order) {
          br.status = "series residual nonzero at order " + std::to_string(br.series->consistent_through + 1);
          if (!failure) failure = br.status;
        } else {
          br.status = "consistent through order " + std::to_string(order);
        }
      } else if (br.series_class == SeriesClass::Mixed) {
        br.status = "constructed but not consistency-checked";
      } else {
        br.status = "descending series, not constructed";
      }
      out.branches.push_back(std::move(br));
    }
  }
  out.verdict = failure ? *failure : "passes";
  return out;
}

std::string ResonanceReport::to_json() const {
  nlohmann::ordered_json j;
  j["balances"] = nlohmann::ordered_json::array();
  for (const auto& b : branches) {
    nlohmann::ordered_json e;
    e["p"] = rational_json(b.p);
    e["a"] = rational_json(b.a);
    e["resonances"] = nlohmann::ordered_json::array();
    for (const auto& r : b.resonances) e["resonances"].push_back(rational_json(r));
    e["class"] = b.series_class ? to_string(*b.series_class) : "";
    e["consistent_through"] = b.series ? nlohmann::ordered_json(b.series->consistent_through) : nlohmann::ordered_json();
    e["status"] = b.status;
    if (b.series) {
      e["free_constants"] = nlohmann::ordered_json::array();
      if (!b.series->series.x0.is_constant()) e["free_constants"].push_back(to_string(b.series->series.x0));
      for (const auto& f : b.series->series.free_constants) e["free_constants"].push_back(to_string(f));
      e["coefficients"] = nlohmann::ordered_json::array();
      for (const auto& c : b.series->series.coefficients) e["coefficients"].push_back(to_string(c));
    }
    j["balances"].push_back(std::move(e));
  }
  j["leading"] = nlohmann::ordered_json::array();
  for (const auto& b : balances) {
    nlohmann::ordered_json e;
    e["p"] = rational_json(b.p);
    e["polynomial"] = to_string(b.polynomial);
    e["roots"] = nlohmann::ordered_json::array();
    for (const auto& r : b.roots.roots) e["roots"].push_back(rational_json(r));
    j["leading"].push_back(std::move(e));
  }
  j["flags"] = flags;
  j["verdict"] = verdict;
  return j.dump(2);
}

// ---- registry -----------------------------------------------------------------------------

std::vector<std::string> registry_names() { return {"eq02g", "eq02h", "eq02i", "ll01"}; }

reduce::OdeModel registry_ode(const std::string& name) {
  reduce::OdeModel out;
  out.name = name;
  out.independent = "x";
  out.dependent = "y";
  if (name == "ll01") {
    out.equation = reduce::parse_ode("y_xxxx + c^2*y_xx = a1*y + a0", "x", "y");
    return out;
  }
  if (name != "eq02g" && name != "eq02h" && name != "eq02i") throw PainleveError("unknown ODE: " + name);
  const auto src = reduce::reproduce(name).reduction.ode;
  const Expr beta = Expr::parameter("beta");
  const Expr nu_form = expand(substitute(src.equation, Expr::parameter("alpha"), Expr::parameter("nu") * inverse(beta)));
  out.equation = rename_ode(contains(nu_form, beta) ? src.equation : nu_form, src.independent, src.dependent);
  return out;
}

std::vector<CoefficientCheck> check_tabulated_coefficients(int order) {
  if (order < 4) throw PainleveError("F3 needs truncation order 4 or more");
  SymbolTable st;
  st.parameters = {"nu", "x0", "F0", "F1"};
  const std::pair<const char*, const char*> printed[] = {
      {"F2",
       "(-F0 - 12*nu*x0 - 156*F0*nu*x0^2 - 168*F0^2*nu*x0^3 - 168*F1*nu*x0^3 - 32*F0^3*nu*x0^4 -"
       " 96*F0*F1*nu*x0^4) / (64*nu*x0^4)"},
      {"F3",
       "(22*F0 + 7*F0^2*x0 - 3*F1*x0 + 240*nu*x0 + 2880*F0*nu*x0^2 + 3780*F0^2*nu*x0^3 + 2220*F1*nu*x0^3 +"
       " 1680*F0^3*nu*x0^4 + 1680*F0*F1*nu*x0^4 + 240*F0^4*nu*x0^5 + 480*F0^2*F1*nu*x0^5 - 240*F1^2*nu*x0^5) /"
       " (480*nu*x0^5)"},
  };
  const auto s = build_series(to_polynomial(registry_ode("eq02i")), Rational(-1), Rational(1), order);
  std::vector<CoefficientCheck> out;
  for (std::size_t i = 0; i < 2; ++i) {
    CoefficientCheck c;
    c.name = printed[i].first;
    c.derived = s.series.coefficients.at(i + 3);
    c.printed = parse(printed[i].second, st);
    c.equivalence = equivalent(c.derived, c.printed);
    c.difference = simplify(c.derived - c.printed);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace beamsym::painleve
