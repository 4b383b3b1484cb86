#include "beamsym/parse.hpp"

#include <algorithm>
#include <cctype>

namespace beamsym {

bool SymbolTable::is_independent(std::string_view name) const {
  return std::find(independents.begin(), independents.end(), name) != independents.end();
}

SymbolTable SymbolTable::beam() {
  SymbolTable s;
  s.parameters = {"alpha", "beta", "epsilon", "nu"};
  s.independents = {"t", "x"};
  s.dependents = {"u"};
  return s;
}

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

UnknownSymbolError::UnknownSymbolError(const std::string& name, std::size_t offset)
    : ParseError("unknown symbol '" + name + "'", offset), name_(name) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : s_(text), sym_(symbols) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return add(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors;
    // A leading sign joins the factor list so "-(a + b)*c" stays one product.
    if (accept('-')) factors.push_back(Expr(-1));
    factors.push_back(factor());
    for (;;) {
      if (accept('*')) {
        factors.push_back(factor());
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        factors.push_back(pow(d, Rational(-1)));
      } else {
        break;
      }
    }
    return mul(std::move(factors));
  }

  Expr factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    Expr base = atom();
    if (accept('^')) {
      const std::size_t at = pos_;
      const Rational q = exponent();
      if (base.is_zero() && q.is_negative()) throw ParseError("zero raised to a negative power", at);
      return pow(base, q);
    }
    return base;
  }

  std::string digits() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected a number", pos_);
    return std::string(s_.substr(start, pos_ - start));
  }

  Rational exponent() {
    const bool paren = accept('(');
    bool negative = false;
    if (accept('-')) {
      negative = true;
    } else {
      accept('+');
    }
    const std::string num = digits();
    mpz_class den(1);
    // a bare exponent is an integer; "x^2/3" divides x^2 by 3
    if (paren && accept('/')) {
      const std::size_t at = pos_;
      den = mpz_class(digits());
      if (den == 0) throw ParseError("zero denominator in exponent", at);
    }
    if (paren) expect(')');
    Rational q{mpz_class(num), den};
    return negative ? -q : q;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr(Rational(mpz_class(digits())));
    if (std::isalpha(static_cast<unsigned char>(c))) return named();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr named() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));

    int primes = 0;
    while (pos_ < s_.size() && s_[pos_] == '\'') {
      ++primes;
      ++pos_;
    }
    skip_ws();
    const bool call = pos_ < s_.size() && s_[pos_] == '(';

    if (call) {
      static const std::pair<const char*, Expr (*)(const Expr&)> builtins[] = {
          {"sin", &beamsym::sin}, {"cos", &beamsym::cos}, {"exp", &beamsym::exp}, {"log", &beamsym::log}};
      if (primes == 0) {
        for (const auto& [fname, fn] : builtins) {
          if (name == fname) {
            ++pos_;
            Expr a = expr();
            expect(')');
            return fn(a);
          }
        }
      }
      if (sym_.functions.count(name)) {
        ++pos_;
        Expr a = expr();
        expect(')');
        return Expr::arbitrary(name, primes, a);
      }
      throw UnknownSymbolError(name, start);
    }
    if (primes > 0) throw ParseError("primes are only allowed on function names", start);

    if (sym_.parameters.count(name)) return Expr::parameter(name);
    if (sym_.is_independent(name)) return Expr::independent(name);
    if (sym_.dependents.count(name)) return Expr::jet(name);

    const auto us = name.find('_');
    if (us != std::string::npos) {
      const std::string dep = name.substr(0, us);
      const std::string idx = name.substr(us + 1);
      if (sym_.dependents.count(dep) && !idx.empty()) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (!sym_.is_independent(std::string(1, idx[k])))
            throw ParseError("'" + std::string(1, idx[k]) + "' is not an independent variable", start + us + 1 + k);
        }
        return Expr::jet(dep, idx);
      }
    }
    throw UnknownSymbolError(name, start);
  }

  std::string_view s_;
  const SymbolTable& sym_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const SymbolTable& symbols) { return Parser(text, symbols).run(); }

}  // namespace beamsym
