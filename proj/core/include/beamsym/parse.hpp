#pragma once

#include "beamsym/expr.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace beamsym {

/// Names the parser is allowed to resolve.
struct SymbolTable {
  std::set<std::string> parameters;
  std::vector<std::string> independents;  // in canonical order
  std::set<std::string> dependents;
  std::set<std::string> functions;  // arbitrary one-argument functions, e.g. f(u), f'(u)

  bool is_independent(std::string_view name) const;

  /// Parameters alpha, beta, epsilon, nu; independents t, x; dependent u.
  static SymbolTable beam();
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownSymbolError : public ParseError {
 public:
  UnknownSymbolError(const std::string& name, std::size_t offset);
  const std::string& symbol() const { return name_; }

 private:
  std::string name_;
};

/// Parses `text` in the expression grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | atom ("^" exponent)?
///   atom   := integer | name | name "_" letters | func "(" expr ")" | "(" expr ")"
/// Exponents are rationals, optionally signed and parenthesized: x^2, x^(-1/2).
Expr parse(std::string_view text, const SymbolTable& symbols);

}  // namespace beamsym
