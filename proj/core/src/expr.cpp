#include "beamsym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace beamsym {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

int letter_rank(char c) {
  if (c == 't') return 0;
  if (c == 'x') return 1;
  return 2 + static_cast<unsigned char>(c);
}

int kind_rank(Kind k) { return static_cast<int>(k); }

}  // namespace

struct NodeFactory {
  static Expr make(Node n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 1000003u;
    h = mix(h, static_cast<std::size_t>(n.func));
    switch (n.kind) {
      case Kind::Constant:
        h = mix(h, n.value.hash());
        break;
      case Kind::Parameter:
      case Kind::Independent:
        h = mix(h, std::hash<std::string>{}(n.name));
        break;
      case Kind::Jet:
        h = mix(h, std::hash<std::string>{}(n.name));
        h = mix(h, std::hash<std::string>{}(n.index));
        break;
      case Kind::Power:
        h = mix(h, n.value.hash());
        break;
      case Kind::Function:
        if (n.func == Func::Arbitrary) {
          h = mix(h, std::hash<std::string>{}(n.name));
          h = mix(h, n.value.hash());
        }
        break;
      default:
        break;
    }
    for (const auto& a : n.args) h = mix(h, a.hash());
    n.hash = h;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  static Expr constant(const Rational& v) {
    Node n;
    n.kind = Kind::Constant;
    n.value = v;
    return make(std::move(n));
  }

  static Expr raw(Kind kind, std::vector<Expr> args, Rational value = Rational(0), Func func = Func::Sin,
                  std::string name = {}) {
    Node n;
    n.kind = kind;
    n.args = std::move(args);
    n.value = std::move(value);
    n.func = func;
    n.name = std::move(name);
    return make(std::move(n));
  }
};

namespace {

const Expr& zero_expr() {
  static const Expr z = NodeFactory::constant(Rational(0));
  return z;
}
const Expr& one_expr() {
  static const Expr o = NodeFactory::constant(Rational(1));
  return o;
}

Expr constant(const Rational& v) {
  if (v.is_zero()) return zero_expr();
  if (v.is_one()) return one_expr();
  return NodeFactory::constant(v);
}

}  // namespace

// ---- Expr basics -------------------------------------------------------------

Expr::Expr() : n_(zero_expr().n_) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& v) : n_(constant(v).n_) {}

Expr Expr::parameter(std::string name) {
  Node n;
  n.kind = Kind::Parameter;
  n.name = std::move(name);
  return NodeFactory::make(std::move(n));
}

Expr Expr::independent(std::string name) {
  Node n;
  n.kind = Kind::Independent;
  n.name = std::move(name);
  return NodeFactory::make(std::move(n));
}

Expr Expr::jet(std::string dependent, std::string_view index) {
  Node n;
  n.kind = Kind::Jet;
  n.name = std::move(dependent);
  n.index = canonical_index(index);
  return NodeFactory::make(std::move(n));
}

Expr Expr::arbitrary(std::string name, int order, const Expr& arg) {
  return NodeFactory::raw(Kind::Function, {arg}, Rational(order), Func::Arbitrary, std::move(name));
}

Kind Expr::kind() const { return n_->kind; }
bool Expr::is_zero() const { return n_->kind == Kind::Constant && n_->value.is_zero(); }
bool Expr::is_one() const { return n_->kind == Kind::Constant && n_->value.is_one(); }
bool Expr::is_atom() const {
  return n_->kind == Kind::Parameter || n_->kind == Kind::Independent || n_->kind == Kind::Jet;
}
const Rational& Expr::value() const { return n_->value; }
const std::string& Expr::name() const { return n_->name; }
const std::string& Expr::index() const { return n_->index; }
Func Expr::func() const { return n_->func; }
const std::vector<Expr>& Expr::args() const { return n_->args; }
std::size_t Expr::hash() const { return n_->hash; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.n_ == b.n_) return true;
  if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
  return compare(a, b) == 0;
}

Expr Expr::operator-() const { return mul({Expr(-1), *this}); }
Expr& Expr::operator+=(const Expr& o) { return *this = add({*this, o}); }
Expr& Expr::operator-=(const Expr& o) { return *this = add({*this, -o}); }
Expr& Expr::operator*=(const Expr& o) { return *this = mul({*this, o}); }
Expr& Expr::operator/=(const Expr& o) { return *this = mul({*this, pow(o, Rational(-1))}); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Rational(-1))}); }

bool ExprLess::operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }

std::string canonical_index(std::string_view index) {
  std::string s(index);
  std::sort(s.begin(), s.end(), [](char a, char b) { return letter_rank(a) < letter_rank(b); });
  return s;
}

std::optional<std::string> index_minus(std::string_view a, std::string_view b) {
  std::string rest(a);
  for (char c : b) {
    const auto pos = rest.find(c);
    if (pos == std::string::npos) return std::nullopt;
    rest.erase(pos, 1);
  }
  return rest;
}

int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  const int ka = kind_rank(a.kind());
  const int kb = kind_rank(b.kind());
  if (ka != kb) return ka < kb ? -1 : 1;
  switch (a.kind()) {
    case Kind::Constant:
      return a.value() < b.value() ? -1 : (b.value() < a.value() ? 1 : 0);
    case Kind::Parameter:
    case Kind::Independent:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Kind::Jet: {
      if (a.name() != b.name()) return a.name() < b.name() ? -1 : 1;
      const auto& ia = a.index();
      const auto& ib = b.index();
      if (ia.size() != ib.size()) return ia.size() < ib.size() ? -1 : 1;
      for (std::size_t i = 0; i < ia.size(); ++i) {
        if (ia[i] != ib[i]) return letter_rank(ia[i]) < letter_rank(ib[i]) ? -1 : 1;
      }
      return 0;
    }
    case Kind::Sum:
    case Kind::Product: {
      const auto& xa = a.args();
      const auto& xb = b.args();
      const std::size_t n = std::min(xa.size(), xb.size());
      for (std::size_t i = 0; i < n; ++i) {
        const int c = compare(xa[i], xb[i]);
        if (c != 0) return c;
      }
      if (xa.size() != xb.size()) return xa.size() < xb.size() ? -1 : 1;
      return 0;
    }
    case Kind::Power: {
      const int c = compare(a.arg0(), b.arg0());
      if (c != 0) return c;
      return a.value() < b.value() ? -1 : (b.value() < a.value() ? 1 : 0);
    }
    case Kind::Function: {
      if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
      if (a.func() == Func::Arbitrary) {
        if (a.name() != b.name()) return a.name() < b.name() ? -1 : 1;
        if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
      }
      return compare(a.arg0(), b.arg0());
    }
  }
  return 0;
}

// ---- structure helpers ---------------------------------------------------------

std::vector<Expr> terms_of(const Expr& e) {
  if (e.is_sum()) return e.args();
  if (e.is_zero()) return {};
  return {e};
}

std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.value(), one_expr()};
  if (term.is_product() && term.args().front().is_constant()) {
    const auto& a = term.args();
    if (a.size() == 2) return {a[0].value(), a[1]};
    std::vector<Expr> rest(a.begin() + 1, a.end());
    return {a[0].value(), NodeFactory::raw(Kind::Product, std::move(rest))};
  }
  return {Rational(1), term};
}

std::vector<std::pair<Expr, Rational>> factors_of(const Expr& term) {
  std::vector<std::pair<Expr, Rational>> out;
  auto push = [&](const Expr& f) {
    if (f.is_constant()) return;
    if (f.is_power())
      out.emplace_back(f.arg0(), f.value());
    else
      out.emplace_back(f, Rational(1));
  };
  if (term.is_product()) {
    for (const auto& f : term.args()) push(f);
  } else {
    push(term);
  }
  return out;
}

namespace {

Expr with_coefficient(const Rational& c, const Expr& rest) {
  if (c.is_zero()) return zero_expr();
  if (rest.is_one()) return constant(c);
  if (c.is_one()) return rest;
  std::vector<Expr> args;
  args.push_back(constant(c));
  if (rest.is_product()) {
    args.insert(args.end(), rest.args().begin(), rest.args().end());
  } else {
    args.push_back(rest);
  }
  return NodeFactory::raw(Kind::Product, std::move(args));
}

bool leading_negative(const Expr& z) {
  switch (z.kind()) {
    case Kind::Constant:
      return z.value().is_negative();
    case Kind::Product:
      return z.args().front().is_constant() && z.args().front().value().is_negative();
    case Kind::Sum:
      for (const auto& t : z.args()) {
        if (!t.is_constant()) return leading_negative(t);
      }
      return false;
    default:
      return false;
  }
}

}  // namespace

// ---- canonical constructors ------------------------------------------------------

Expr add(std::vector<Expr> terms) {
  Rational constant_part(0);
  std::unordered_map<Expr, Rational, ExprHash> coeffs;
  std::vector<Expr> order;
  std::function<void(const Expr&)> push = [&](const Expr& t) {
    if (t.is_constant()) {
      constant_part += t.value();
    } else if (t.is_sum()) {
      for (const auto& c : t.args()) push(c);
    } else {
      auto [c, rest] = split_coefficient(t);
      auto it = coeffs.find(rest);
      if (it == coeffs.end()) {
        coeffs.emplace(rest, c);
        order.push_back(rest);
      } else {
        it->second += c;
      }
    }
  };
  for (const auto& t : terms) push(t);

  std::vector<std::pair<Expr, Rational>> kept;
  kept.reserve(order.size());
  for (const auto& r : order) {
    const auto& c = coeffs.at(r);
    if (!c.is_zero()) kept.emplace_back(r, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });

  if (kept.empty()) return constant(constant_part);
  if (kept.size() == 1 && constant_part.is_zero()) return with_coefficient(kept[0].second, kept[0].first);
  std::vector<Expr> args;
  args.reserve(kept.size() + 1);
  if (!constant_part.is_zero()) args.push_back(constant(constant_part));
  for (const auto& [r, c] : kept) args.push_back(with_coefficient(c, r));
  return NodeFactory::raw(Kind::Sum, std::move(args));
}

namespace {

Expr raw_exp(const Expr& arg) { return NodeFactory::raw(Kind::Function, {arg}, Rational(0), Func::Exp); }

}  // namespace

Expr mul(std::vector<Expr> factors) {
  Rational coef(1);
  std::unordered_map<Expr, Rational, ExprHash> exps;
  std::vector<Expr> order;
  std::vector<Expr> exp_factors;
  bool zero = false;

  auto add_base = [&](const Expr& base, const Rational& e) {
    auto it = exps.find(base);
    if (it == exps.end()) {
      exps.emplace(base, e);
      order.push_back(base);
    } else {
      it->second += e;
    }
  };
  std::function<void(const Expr&)> push = [&](const Expr& f) {
    switch (f.kind()) {
      case Kind::Constant:
        if (f.value().is_zero()) zero = true;
        coef *= f.value();
        break;
      case Kind::Product:
        for (const auto& c : f.args()) push(c);
        break;
      case Kind::Power:
        add_base(f.arg0(), f.value());
        break;
      case Kind::Function:
        if (f.func() == Func::Exp) {
          exp_factors.push_back(f);
          break;
        }
        add_base(f, Rational(1));
        break;
      default:
        add_base(f, Rational(1));
        break;
    }
  };
  for (const auto& f : factors) push(f);
  if (zero) return zero_expr();

  std::vector<Expr> out;
  if (exp_factors.size() == 1) {
    out.push_back(exp_factors.front());
  } else if (exp_factors.size() > 1) {
    std::vector<Expr> args;
    for (const auto& f : exp_factors) args.push_back(f.arg0());
    const Expr combined = exp(add(std::move(args)));
    // The combined exponential has no rational-log terms left, so its
    // pieces can be merged without recursing into exp() again.
    std::vector<Expr> pieces = combined.is_product() ? combined.args() : std::vector<Expr>{combined};
    for (const auto& p : pieces) {
      if (p.is_constant()) {
        coef *= p.value();
      } else if (p.is_function() && p.func() == Func::Exp) {
        out.push_back(p);
      } else if (p.is_power()) {
        add_base(p.arg0(), p.value());
      } else {
        add_base(p, Rational(1));
      }
    }
  }

  for (const auto& base : order) {
    Rational e = exps.at(base);
    if (e.is_zero()) continue;
    if (base.is_constant()) {
      if (auto exact = base.value().exact_pow(e)) {
        coef *= *exact;
        continue;
      }
      if (base.value().is_negative()) {
        out.push_back(NodeFactory::raw(Kind::Power, {base}, e));
        continue;
      }
      // base^e = base^floor(e) * base^frac(e), 0 < frac < 1.
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), e.num().get_mpz_t(), e.den().get_mpz_t());
      const Rational whole{fl};
      coef *= base.value().pow(whole.to_long());
      out.push_back(NodeFactory::raw(Kind::Power, {base}, e - whole));
      continue;
    }
    if (e.is_one()) {
      out.push_back(base);
    } else {
      out.push_back(NodeFactory::raw(Kind::Power, {base}, e));
    }
  }
  if (coef.is_zero()) return zero_expr();
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) {
    const Expr& ba = a.is_power() ? a.arg0() : a;
    const Expr& bb = b.is_power() ? b.arg0() : b;
    const int c = compare(ba, bb);
    if (c != 0) return c < 0;
    return compare(a, b) < 0;
  });
  if (out.empty()) return constant(coef);
  if (out.size() == 1) {
    if (coef.is_one()) return out.front();
    if (out.front().is_sum()) {
      std::vector<Expr> scaled;
      for (const auto& t : out.front().args()) scaled.push_back(mul({constant(coef), t}));
      return add(std::move(scaled));
    }
  }
  std::vector<Expr> args;
  args.reserve(out.size() + 1);
  if (!coef.is_one()) args.push_back(constant(coef));
  args.insert(args.end(), out.begin(), out.end());
  return NodeFactory::raw(Kind::Product, std::move(args));
}

Expr pow(const Expr& base, const Rational& q) {
  if (q.is_zero()) return one_expr();
  if (q.is_one()) return base;
  switch (base.kind()) {
    case Kind::Constant: {
      if (base.value().is_zero() && q.is_negative()) throw std::domain_error("zero raised to a negative power");
      return mul({NodeFactory::raw(Kind::Power, {base}, q)});
    }
    case Kind::Power:
      return pow(base.arg0(), base.value() * q);
    case Kind::Product: {
      std::vector<Expr> parts;
      for (const auto& f : base.args()) parts.push_back(pow(f, q));
      return mul(std::move(parts));
    }
    case Kind::Function:
      if (base.func() == Func::Exp) return exp(mul({constant(q), base.arg0()}));
      return NodeFactory::raw(Kind::Power, {base}, q);
    default:
      return NodeFactory::raw(Kind::Power, {base}, q);
  }
}

Expr sqrt(const Expr& e) { return pow(e, Rational(1, 2)); }
Expr inverse(const Expr& e) { return pow(e, Rational(-1)); }

Expr sin(const Expr& e) {
  if (e.is_zero()) return zero_expr();
  if (leading_negative(e)) return -sin(-e);
  return NodeFactory::raw(Kind::Function, {e}, Rational(0), Func::Sin);
}

Expr cos(const Expr& e) {
  if (e.is_zero()) return one_expr();
  if (leading_negative(e)) return cos(-e);
  return NodeFactory::raw(Kind::Function, {e}, Rational(0), Func::Cos);
}

Expr exp(const Expr& e) {
  if (e.is_zero()) return one_expr();
  std::vector<Expr> powers;
  std::vector<Expr> kept;
  for (const auto& t : terms_of(e)) {
    auto [c, rest] = split_coefficient(t);
    if (rest.is_function() && rest.func() == Func::Log) {
      powers.push_back(pow(rest.arg0(), c));
    } else {
      kept.push_back(t);
    }
  }
  if (powers.empty()) return raw_exp(e);
  if (!kept.empty()) powers.push_back(raw_exp(add(std::move(kept))));
  return mul(std::move(powers));
}

Expr log(const Expr& e) {
  if (e.is_one()) return zero_expr();
  if (e.is_constant() && !e.value().is_negative() && !e.is_zero()) {
    return NodeFactory::raw(Kind::Function, {e}, Rational(0), Func::Log);
  }
  switch (e.kind()) {
    case Kind::Function:
      if (e.func() == Func::Exp) return e.arg0();
      break;
    case Kind::Power:
      return mul({constant(e.value()), log(e.arg0())});
    case Kind::Product: {
      const auto& a = e.args();
      if (a.front().is_constant() && a.front().value().is_negative()) break;
      std::vector<Expr> parts;
      for (const auto& f : a) parts.push_back(log(f));
      return add(std::move(parts));
    }
    default:
      break;
  }
  return NodeFactory::raw(Kind::Function, {e}, Rational(0), Func::Log);
}

// ---- queries -----------------------------------------------------------------------

namespace {

void collect_atoms(const Expr& e, ExprSet& out) {
  if (e.is_atom()) {
    out.insert(e);
    return;
  }
  for (const auto& a : e.args()) collect_atoms(a, out);
}

}  // namespace

ExprSet free_atoms(const Expr& e) {
  ExprSet out;
  collect_atoms(e, out);
  return out;
}

bool contains_atom(const Expr& e, const std::function<bool(const Expr&)>& pred) {
  if (e.is_atom()) return pred(e);
  for (const auto& a : e.args())
    if (contains_atom(a, pred)) return true;
  return false;
}

bool contains(const Expr& e, const Expr& atom) {
  if (e == atom) return true;
  for (const auto& a : e.args())
    if (contains(a, atom)) return true;
  return false;
}

bool has_transcendental(const Expr& e) {
  if (e.is_function()) return true;
  if (e.is_power() && !e.value().is_integer()) return true;
  for (const auto& a : e.args())
    if (has_transcendental(a)) return true;
  return false;
}

// ---- rewriting -------------------------------------------------------------------

namespace {

// Keyed by node address; the stored key keeps the node alive so addresses are not reused.
using Cache = std::unordered_map<const Node*, std::pair<Expr, Expr>>;

Expr rebuild(const Expr& e, std::vector<Expr> args) {
  switch (e.kind()) {
    case Kind::Sum:
      return add(std::move(args));
    case Kind::Product:
      return mul(std::move(args));
    case Kind::Power:
      return pow(args[0], e.value());
    case Kind::Function:
      switch (e.func()) {
        case Func::Sin:
          return sin(args[0]);
        case Func::Cos:
          return cos(args[0]);
        case Func::Exp:
          return exp(args[0]);
        case Func::Log:
          return log(args[0]);
        case Func::Arbitrary:
          return Expr::arbitrary(e.name(), static_cast<int>(e.value().to_long()), args[0]);
      }
      break;
    default:
      break;
  }
  return e;
}

Expr map_atoms_rec(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn, Cache& cache) {
  if (e.is_constant()) return e;
  if (auto it = cache.find(e.node()); it != cache.end()) return it->second.second;
  Expr out;
  if (e.is_atom()) {
    auto r = fn(e);
    out = r ? *r : e;
  } else {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto& a : e.args()) {
      args.push_back(map_atoms_rec(a, fn, cache));
      if (args.back().node() != a.node()) changed = true;
    }
    out = changed ? rebuild(e, std::move(args)) : e;
  }
  cache.emplace(e.node(), std::make_pair(e, out));
  return out;
}

Expr substitute_rec(const Expr& e, const ExprMap& rules, Cache& cache) {
  if (auto it = rules.find(e); it != rules.end()) return it->second;
  if (e.is_constant() || e.is_atom()) return e;
  if (auto it = cache.find(e.node()); it != cache.end()) return it->second.second;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto& a : e.args()) {
    args.push_back(substitute_rec(a, rules, cache));
    if (args.back().node() != a.node()) changed = true;
  }
  Expr out = changed ? rebuild(e, std::move(args)) : e;
  cache.emplace(e.node(), std::make_pair(e, out));
  return out;
}

}  // namespace

Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn) {
  Cache cache;
  return map_atoms_rec(e, fn, cache);
}

Expr substitute(const Expr& e, const ExprMap& rules) {
  Cache cache;
  return substitute_rec(e, rules, cache);
}

Expr substitute(const Expr& e, const Expr& target, const Expr& replacement) {
  ExprMap rules;
  rules.emplace(target, replacement);
  return substitute(e, rules);
}

// ---- expansion ------------------------------------------------------------------------

namespace {

class TermAccumulator {
 public:
  void add_term(const Expr& term, const Rational& scale) {
    auto [c, rest] = split_coefficient(term);
    c *= scale;
    if (c.is_zero()) return;
    auto it = coeffs_.find(rest);
    if (it == coeffs_.end()) {
      coeffs_.emplace(rest, c);
      order_.push_back(rest);
    } else {
      it->second += c;
    }
  }
  const std::vector<Expr>& order() const { return order_; }
  const Rational& coeff(const Expr& m) const { return coeffs_.at(m); }
  Expr to_expr() const {
    std::vector<Expr> out;
    out.reserve(order_.size());
    for (const auto& m : order_) {
      const auto& c = coeffs_.at(m);
      if (!c.is_zero()) out.push_back(mul({Expr(c), m}));
    }
    return add(std::move(out));
  }

 private:
  std::unordered_map<Expr, Rational, ExprHash> coeffs_;
  std::vector<Expr> order_;
};

bool needs_distribution(const Expr& m) {
  for (const auto& [base, e] : factors_of(m)) {
    if (base.is_sum() && e.is_integer() && !e.is_negative()) return true;
  }
  return false;
}

Expr expand_rec(const Expr& e, Cache& cache);

void multiply_into(TermAccumulator& acc, const Expr& f, Cache& cache) {
  TermAccumulator next;
  const auto fterms = terms_of(f);
  for (const auto& m : acc.order()) {
    const Rational& c = acc.coeff(m);
    if (c.is_zero()) continue;
    for (const auto& t : fterms) {
      Expr prod = mul({m, t});
      if (needs_distribution(prod)) prod = expand_rec(prod, cache);
      for (const auto& pt : terms_of(prod)) next.add_term(pt, c);
    }
  }
  acc = std::move(next);
}

Expr expand_rec(const Expr& e, Cache& cache) {
  switch (e.kind()) {
    case Kind::Constant:
    case Kind::Parameter:
    case Kind::Independent:
    case Kind::Jet:
      return e;
    default:
      break;
  }
  if (auto it = cache.find(e.node()); it != cache.end()) return it->second.second;
  Expr out;
  switch (e.kind()) {
    case Kind::Sum: {
      TermAccumulator acc;
      for (const auto& t : e.args()) {
        for (const auto& x : terms_of(expand_rec(t, cache))) acc.add_term(x, Rational(1));
      }
      out = acc.to_expr();
      break;
    }
    case Kind::Product: {
      TermAccumulator acc;
      acc.add_term(one_expr(), Rational(1));
      std::vector<Expr> sums;
      std::vector<Expr> plain;
      for (const auto& f : e.args()) {
        Expr x = expand_rec(f, cache);
        if (x.is_sum())
          sums.push_back(x);
        else
          plain.push_back(x);
      }
      if (!plain.empty()) multiply_into(acc, mul(std::move(plain)), cache);
      for (const auto& s : sums) multiply_into(acc, s, cache);
      out = acc.to_expr();
      break;
    }
    case Kind::Power: {
      Expr b = expand_rec(e.arg0(), cache);
      const Rational& q = e.value();
      if (b.is_sum() && q.is_integer() && !q.is_negative() && q.fits_long()) {
        TermAccumulator acc;
        acc.add_term(one_expr(), Rational(1));
        for (long k = 0; k < q.to_long(); ++k) multiply_into(acc, b, cache);
        out = acc.to_expr();
      } else {
        out = pow(b, q);
        if (needs_distribution(out)) out = expand_rec(out, cache);
      }
      break;
    }
    case Kind::Function: {
      Expr a = expand_rec(e.arg0(), cache);
      out = rebuild(e, {a});
      if (out.is_product() || out.is_sum()) {
        // exp/log rewriting may expose new structure
        if (out.node() != e.node() && (needs_distribution(out) || out.is_sum())) {
          Expr again = out;
          out = expand_rec(again, cache);
        }
      }
      break;
    }
    default:
      out = e;
  }
  cache.emplace(e.node(), std::make_pair(e, out));
  return out;
}

}  // namespace

Expr expand(const Expr& e) {
  Cache cache;
  return expand_rec(e, cache);
}

// ---- differentiation ---------------------------------------------------------------

namespace {

Expr diff_rec(const Expr& e, const std::function<Expr(const Expr&)>& d, Cache& cache) {
  if (e.is_constant()) return zero_expr();
  if (auto it = cache.find(e.node()); it != cache.end()) return it->second.second;
  Expr out;
  switch (e.kind()) {
    case Kind::Parameter:
    case Kind::Independent:
    case Kind::Jet:
      out = d(e);
      break;
    case Kind::Sum: {
      std::vector<Expr> parts;
      for (const auto& t : e.args()) parts.push_back(diff_rec(t, d, cache));
      out = add(std::move(parts));
      break;
    }
    case Kind::Product: {
      const auto& f = e.args();
      std::vector<Expr> parts;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].is_constant()) continue;
        Expr di = diff_rec(f[i], d, cache);
        if (di.is_zero()) continue;
        std::vector<Expr> prod;
        prod.reserve(f.size());
        for (std::size_t j = 0; j < f.size(); ++j)
          if (j != i) prod.push_back(f[j]);
        prod.push_back(di);
        parts.push_back(mul(std::move(prod)));
      }
      out = add(std::move(parts));
      break;
    }
    case Kind::Power: {
      Expr db = diff_rec(e.arg0(), d, cache);
      out = db.is_zero() ? zero_expr() : mul({Expr(e.value()), pow(e.arg0(), e.value() - Rational(1)), db});
      break;
    }
    case Kind::Function: {
      const Expr& a = e.arg0();
      Expr da = diff_rec(a, d, cache);
      if (da.is_zero()) {
        out = zero_expr();
        break;
      }
      switch (e.func()) {
        case Func::Sin:
          out = mul({cos(a), da});
          break;
        case Func::Cos:
          out = mul({Expr(-1), sin(a), da});
          break;
        case Func::Exp:
          out = mul({e, da});
          break;
        case Func::Log:
          out = mul({da, pow(a, Rational(-1))});
          break;
        case Func::Arbitrary:
          out = mul({Expr::arbitrary(e.name(), static_cast<int>(e.value().to_long()) + 1, a), da});
          break;
      }
      break;
    }
    default:
      out = zero_expr();
  }
  cache.emplace(e.node(), std::make_pair(e, out));
  return out;
}

}  // namespace

Expr differentiate(const Expr& e, const std::function<Expr(const Expr&)>& atom_derivative) {
  Cache cache;
  return diff_rec(e, atom_derivative, cache);
}

Expr partial(const Expr& e, const Expr& atom) {
  return differentiate(e, [&](const Expr& a) { return a == atom ? one_expr() : zero_expr(); });
}

Expr total_derivative(const Expr& e, const std::string& v) {
  return differentiate(e, [&](const Expr& a) -> Expr {
    switch (a.kind()) {
      case Kind::Independent:
        return a.name() == v ? one_expr() : zero_expr();
      case Kind::Jet:
        return Expr::jet(a.name(), a.index() + v);
      default:
        return zero_expr();
    }
  });
}

Expr total_derivative_multi(const Expr& e, std::string_view index) {
  Expr out = e;
  for (char c : index) out = total_derivative(out, std::string(1, c));
  return out;
}

// ---- zero testing --------------------------------------------------------------------

std::pair<Expr, Expr> together(const Expr& e) {
  Expr num = expand(e);
  Expr den = one_expr();
  for (int iter = 0; iter < 8; ++iter) {
    std::unordered_map<Expr, Rational, ExprHash> need;
    std::vector<Expr> order;
    for (const auto& t : terms_of(num)) {
      for (const auto& [base, k] : factors_of(t)) {
        if (!base.is_sum() || !k.is_integer() || !k.is_negative()) continue;
        auto it = need.find(base);
        if (it == need.end()) {
          need.emplace(base, -k);
          order.push_back(base);
        } else if (-k > it->second) {
          it->second = -k;
        }
      }
    }
    if (order.empty()) break;
    std::vector<Expr> mult;
    for (const auto& s : order) mult.push_back(pow(s, need.at(s)));
    const Expr m = mul(mult);
    std::vector<Expr> parts;
    for (const auto& t : terms_of(num)) parts.push_back(expand(mul({t, m})));
    num = add(std::move(parts));
    den = mul({den, m});
  }
  return {num, den};
}

bool is_zero(const Expr& e) {
  if (e.is_zero()) return true;
  return together(e).first.is_zero();
}

namespace {

// Degree of `v` in a term when it appears with a non-negative integer exponent.
std::optional<long> degree_in(const Expr& term, const Expr& v) {
  for (const auto& [base, k] : factors_of(term)) {
    if (base == v) {
      if (!k.is_integer() || k.is_negative()) return std::nullopt;
      return k.to_long();
    }
    if (contains(base, v)) return std::nullopt;
  }
  return 0;
}

// Exact division num / divisor when divisor has a monomial leading coefficient
// in some atom; nullopt when no exact quotient is found.
std::optional<Expr> try_divide(const Expr& num, const Expr& divisor) {
  for (const auto& v : free_atoms(divisor)) {
    long d = -1;
    Expr lead;
    bool ok = true;
    std::vector<Expr> lead_terms;
    for (const auto& t : terms_of(divisor)) {
      auto k = degree_in(t, v);
      if (!k) {
        ok = false;
        break;
      }
      if (*k > d) {
        d = *k;
        lead_terms.clear();
      }
      if (*k == d) lead_terms.push_back(t);
    }
    if (!ok || d <= 0 || lead_terms.size() != 1) continue;
    const Expr lead_coeff = mul({lead_terms[0], pow(v, Rational(-d))});
    Expr rem = num;
    std::vector<Expr> quotient;
    for (int guard = 0; guard < 64 && !rem.is_zero(); ++guard) {
      long top = -1;
      std::vector<Expr> top_terms;
      bool poly = true;
      for (const auto& t : terms_of(rem)) {
        auto k = degree_in(t, v);
        if (!k) {
          poly = false;
          break;
        }
        if (*k > top) {
          top = *k;
          top_terms.clear();
        }
        if (*k == top) top_terms.push_back(t);
      }
      if (!poly || top < d) break;
      const Expr q = expand(mul({add(top_terms), pow(lead_coeff, Rational(-1)), pow(v, Rational(-d))}));
      quotient.push_back(q);
      rem = expand(rem - expand(q * divisor));
    }
    if (rem.is_zero()) return add(std::move(quotient));
  }
  return std::nullopt;
}

}  // namespace

Expr simplify(const Expr& e) {
  auto [num, den] = together(e);
  if (num.is_zero()) return zero_expr();
  std::vector<Expr> left;
  for (const auto& [base, k] : factors_of(den)) {
    long mult = k.to_long();
    while (mult > 0) {
      auto q = try_divide(num, base);
      if (!q) break;
      num = *q;
      --mult;
    }
    if (mult > 0) left.push_back(pow(base, Rational(-mult)));
  }
  left.push_back(num);
  return expand(mul(std::move(left)));
}

Expr collect_simplify(const Expr& e) {
  auto symbolic = [](const Expr& a) { return a.kind() != Kind::Parameter; };
  std::map<Expr, std::vector<Expr>, ExprLess> groups;
  for (const auto& term : terms_of(expand(e))) {
    auto [c, rest] = split_coefficient(term);
    std::vector<Expr> key{}, coeff{Expr(c)};
    for (const auto& [base, k] : factors_of(rest)) {
      const Expr f = pow(base, k);
      (contains_atom(f, symbolic) || f.is_function() ? key : coeff).push_back(f);
    }
    groups[mul(std::move(key))].push_back(mul(std::move(coeff)));
  }
  std::vector<Expr> out;
  for (auto& [key, coeffs] : groups) out.push_back(simplify(add(std::move(coeffs))) * key);
  return expand(add(std::move(out)));
}

namespace {

Expr simplify_arguments_rec(const Expr& e, Cache& cache) {
  if (e.is_constant() || e.is_atom()) return e;
  if (auto it = cache.find(e.node()); it != cache.end()) return it->second.second;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) {
    Expr r = simplify_arguments_rec(a, cache);
    if (e.is_function()) r = collect_simplify(r);
    args.push_back(std::move(r));
  }
  Expr out = rebuild(e, std::move(args));
  cache.emplace(e.node(), std::make_pair(e, out));
  return out;
}

}  // namespace

Expr simplify_arguments(const Expr& e) {
  Cache cache;
  return simplify_arguments_rec(e, cache);
}

// ---- evaluation ----------------------------------------------------------------------------

std::string atom_key(const Expr& atom) {
  if (atom.is_jet()) return atom.index().empty() ? atom.name() : atom.name() + "_" + atom.index();
  return atom.name();
}

double eval_numeric(const Expr& e, const Assignment& assignment) {
  switch (e.kind()) {
    case Kind::Constant:
      return e.value().to_double();
    case Kind::Parameter:
    case Kind::Independent:
    case Kind::Jet: {
      auto it = assignment.find(atom_key(e));
      if (it == assignment.end()) throw EvalError("missing value for symbol '" + atom_key(e) + "'");
      return it->second;
    }
    case Kind::Sum: {
      double s = 0.0;
      for (const auto& t : e.args()) s += eval_numeric(t, assignment);
      return s;
    }
    case Kind::Product: {
      double p = 1.0;
      for (const auto& f : e.args()) p *= eval_numeric(f, assignment);
      return p;
    }
    case Kind::Power: {
      const double b = eval_numeric(e.arg0(), assignment);
      const Rational& q = e.value();
      if (q.is_integer()) return std::pow(b, q.to_double());
      if (b < 0.0) throw EvalError("non-integer power of a negative value");
      return std::pow(b, q.to_double());
    }
    case Kind::Function: {
      const double a = eval_numeric(e.arg0(), assignment);
      switch (e.func()) {
        case Func::Sin:
          return std::sin(a);
        case Func::Cos:
          return std::cos(a);
        case Func::Exp:
          return std::exp(a);
        case Func::Log:
          if (a <= 0.0) throw EvalError("log of non-positive argument");
          return std::log(a);
        case Func::Arbitrary:
          throw EvalError("cannot evaluate arbitrary function '" + e.name() + "'");
      }
    }
  }
  throw EvalError("unreachable");
}

std::optional<Rational> eval_exact(const Expr& e, const ExactAssignment& assignment) {
  switch (e.kind()) {
    case Kind::Constant:
      return e.value();
    case Kind::Parameter:
    case Kind::Independent:
    case Kind::Jet: {
      auto it = assignment.find(atom_key(e));
      if (it == assignment.end()) throw EvalError("missing value for symbol '" + atom_key(e) + "'");
      return it->second;
    }
    case Kind::Sum: {
      Rational s(0);
      for (const auto& t : e.args()) {
        auto v = eval_exact(t, assignment);
        if (!v) return std::nullopt;
        s += *v;
      }
      return s;
    }
    case Kind::Product: {
      Rational p(1);
      for (const auto& f : e.args()) {
        auto v = eval_exact(f, assignment);
        if (!v) return std::nullopt;
        p *= *v;
      }
      return p;
    }
    case Kind::Power: {
      auto b = eval_exact(e.arg0(), assignment);
      if (!b) return std::nullopt;
      if (b->is_zero() && e.value().is_negative()) throw EvalError("division by zero");
      return b->exact_pow(e.value());
    }
    case Kind::Function:
      return std::nullopt;
  }
  return std::nullopt;
}

Equivalence equivalent(const Expr& a, const Expr& b, std::uint64_t seed) {
  const Expr diff = a - b;
  if (is_zero(diff)) return Equivalence::Equal;

  const ExprSet atoms = free_atoms(diff);
  std::mt19937_64 rng(seed);
  const bool exact = !has_transcendental(diff);
  int checked = 0;
  for (int attempt = 0; attempt < 64 && checked < 10; ++attempt) {
    try {
      if (exact) {
        std::uniform_int_distribution<long> num(1, 97);
        std::uniform_int_distribution<long> den(1, 13);
        ExactAssignment asg;
        for (const auto& s : atoms) asg[atom_key(s)] = Rational(num(rng), den(rng));
        auto v = eval_exact(diff, asg);
        if (!v) break;
        if (!v->is_zero()) return Equivalence::NotEqual;
      } else {
        std::uniform_real_distribution<double> val(0.5, 2.0);
        Assignment asg;
        for (const auto& s : atoms) asg[atom_key(s)] = val(rng);
        const double d = eval_numeric(diff, asg);
        const double scale = std::max({1.0, std::abs(eval_numeric(a, asg)), std::abs(eval_numeric(b, asg))});
        if (!(std::abs(d) <= 1e-9 * scale)) return Equivalence::NotEqual;
      }
      ++checked;
    } catch (const EvalError&) {
      continue;
    } catch (const std::domain_error&) {
      continue;
    }
  }
  if (checked < 10) return Equivalence::NotEqual;
  return Equivalence::ProbablyEqual;
}

const char* to_string(Equivalence v) {
  switch (v) {
    case Equivalence::Equal:
      return "equal";
    case Equivalence::ProbablyEqual:
      return "probabilistically equal";
    case Equivalence::NotEqual:
      return "not equal";
  }
  return "?";
}

// ---- printing ------------------------------------------------------------------------------

namespace {

void print(const Expr& e, std::string& out);

void print_factor(const Expr& f, std::string& out) {
  if (f.is_sum() || f.is_product() || (f.is_constant() && (!f.value().is_integer() || f.value().is_negative()))) {
    out += '(';
    print(f, out);
    out += ')';
  } else {
    print(f, out);
  }
}

void print_factor_list(const std::vector<Expr>& fs, std::string& out) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += '*';
    print_factor(fs[i], out);
  }
}

// Negative powers go into a denominator: "-4*x/(a*b^2)".
void print_product(const Expr& e, std::string& out) {
  const auto& a = e.args();
  std::size_t i = 0;
  Rational c(1);
  if (a.front().is_constant()) {
    c = a.front().value();
    i = 1;
  }
  std::vector<Expr> num, den;
  for (; i < a.size(); ++i) {
    if (a[i].is_power() && a[i].value().is_negative())
      den.push_back(pow(a[i].arg0(), -a[i].value()));
    else
      num.push_back(a[i]);
  }
  if (num.empty()) {
    out += c.str();
  } else {
    if (c == Rational(-1)) {
      out += '-';
    } else if (!c.is_one()) {
      out += c.str();
      out += '*';
    }
    print_factor_list(num, out);
  }
  if (den.empty()) return;
  out += '/';
  if (den.size() == 1 && !den.front().is_product()) {
    print_factor(den.front(), out);
  } else {
    out += '(';
    print_factor_list(den, out);
    out += ')';
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Constant:
      out += e.value().str();
      return;
    case Kind::Parameter:
    case Kind::Independent:
    case Kind::Jet:
      out += atom_key(e);
      return;
    case Kind::Sum: {
      bool first = true;
      for (const auto& t : e.args()) {
        auto [c, rest] = split_coefficient(t);
        if (first) {
          print(t, out);
        } else if (c.is_negative()) {
          out += " - ";
          print(mul({Expr(-c), rest}), out);
        } else {
          out += " + ";
          print(t, out);
        }
        first = false;
      }
      return;
    }
    case Kind::Product:
      print_product(e, out);
      return;
    case Kind::Power: {
      if (e.value().is_negative()) {
        out += "1/";
        print_factor(pow(e.arg0(), -e.value()), out);
        return;
      }
      print_factor(e.arg0(), out);
      const Rational& q = e.value();
      if (q.is_integer() && !q.is_negative()) {
        out += '^';
        out += q.str();
      } else {
        out += "^(";
        out += q.str();
        out += ')';
      }
      return;
    }
    case Kind::Function: {
      switch (e.func()) {
        case Func::Sin:
          out += "sin";
          break;
        case Func::Cos:
          out += "cos";
          break;
        case Func::Exp:
          out += "exp";
          break;
        case Func::Log:
          out += "log";
          break;
        case Func::Arbitrary:
          out += e.name();
          out += std::string(static_cast<std::size_t>(e.value().to_long()), '\'');
          break;
      }
      out += '(';
      print(e.arg0(), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace beamsym
