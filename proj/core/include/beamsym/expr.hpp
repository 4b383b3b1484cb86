#pragma once

// Immutable symbolic expressions over exact rationals.
//
// Every Expr is kept in canonical form by its constructors: sums and products
// are flattened, like terms and like bases are merged, rational constants are
// folded and children are sorted by a fixed total order (constants <
// parameters < independents < jets < sums < products < powers < functions).
// `expand` additionally distributes products over sums.

#include "beamsym/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace beamsym {

enum class Kind : std::uint8_t { Constant, Parameter, Independent, Jet, Sum, Product, Power, Function };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log, Arbitrary };

struct Node;

class Expr {
 public:
  Expr();  // zero
  Expr(long v);              // NOLINT(google-explicit-constructor)
  Expr(int v) : Expr(static_cast<long>(v)) {}  // NOLINT
  Expr(const Rational& v);   // NOLINT

  static Expr parameter(std::string name);
  static Expr independent(std::string name);
  /// Jet variable `dependent_index`; the index is sorted into canonical order.
  static Expr jet(std::string dependent, std::string_view index = {});
  /// Uninterpreted function `name` differentiated `order` times, applied to `arg`.
  static Expr arbitrary(std::string name, int order, const Expr& arg);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  bool is_atom() const;  // parameter, independent or jet
  bool is_sum() const { return kind() == Kind::Sum; }
  bool is_product() const { return kind() == Kind::Product; }
  bool is_power() const { return kind() == Kind::Power; }
  bool is_function() const { return kind() == Kind::Function; }
  bool is_jet() const { return kind() == Kind::Jet; }

  /// Constant value (Constant), exponent (Power), derivative order (Arbitrary function).
  const Rational& value() const;
  /// Symbol name, jet dependent name or arbitrary-function name.
  const std::string& name() const;
  /// Jet multi-index in canonical order.
  const std::string& index() const;
  Func func() const;
  const std::vector<Expr>& args() const;
  /// Power base / function argument.
  const Expr& arg0() const { return args().front(); }

  std::size_t hash() const;
  const Node* node() const { return n_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
  friend struct NodeFactory;
};

struct Node {
  Kind kind = Kind::Constant;
  Func func = Func::Sin;
  std::size_t hash = 0;
  Rational value;
  std::string name;
  std::string index;
  std::vector<Expr> args;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const;
};

using ExprMap = std::unordered_map<Expr, Expr, ExprHash>;
using ExprSet = std::unordered_set<Expr, ExprHash>;

/// Total structural order: <0, 0, >0.
int compare(const Expr& a, const Expr& b);

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
Expr sqrt(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr inverse(const Expr& e);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

// ---- structure helpers ----------------------------------------------------

/// Terms of a sum (or the expression itself).
std::vector<Expr> terms_of(const Expr& e);
/// Splits a term into rational coefficient and the remaining monomial.
std::pair<Rational, Expr> split_coefficient(const Expr& term);
/// Non-constant factors of a term as (base, exponent) pairs.
std::vector<std::pair<Expr, Rational>> factors_of(const Expr& term);

/// All parameter, independent and jet atoms in e.
ExprSet free_atoms(const Expr& e);
/// True if e contains an atom satisfying pred.
bool contains_atom(const Expr& e, const std::function<bool(const Expr&)>& pred);
bool contains(const Expr& e, const Expr& atom);
/// True if e contains a function node or a non-integer power.
bool has_transcendental(const Expr& e);

// ---- rewriting --------------------------------------------------------------

Expr expand(const Expr& e);
/// Exact substitution of subtrees; result is canonical.
Expr substitute(const Expr& e, const ExprMap& rules);
Expr substitute(const Expr& e, const Expr& target, const Expr& replacement);
/// Rebuilds e replacing atoms via fn (nullopt keeps the atom).
Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& fn);

/// Structural derivative; `atom_derivative` supplies d(atom) for parameters,
/// independents and jets.
Expr differentiate(const Expr& e, const std::function<Expr(const Expr&)>& atom_derivative);
/// Partial derivative with respect to an atom (parameter, independent or jet).
Expr partial(const Expr& e, const Expr& atom);
/// Total derivative D_v on jet space: jets u_J map to u_{J+v}.
Expr total_derivative(const Expr& e, const std::string& v);
/// Repeated total derivative along each letter of `index`.
Expr total_derivative_multi(const Expr& e, std::string_view index);

/// Sorts a multi-index string into canonical order (t, x, then alphabetical).
std::string canonical_index(std::string_view index);
/// Multiset difference a - b, or nullopt if b is not contained in a.
std::optional<std::string> index_minus(std::string_view a, std::string_view b);

// ---- zero testing and equivalence -----------------------------------------

/// Exact symbolic zero test: expansion followed by clearing sum denominators.
bool is_zero(const Expr& e);
/// Writes e as numerator * denominator^-1 with sum denominators collected.
std::pair<Expr, Expr> together(const Expr& e);
/// Expand and cancel sum denominators that divide the numerator exactly.
Expr simplify(const Expr& e);
/// Groups terms by their non-parameter part and simplifies each coefficient.
Expr collect_simplify(const Expr& e);
/// Applies collect_simplify to every function argument, innermost first, and rebuilds.
Expr simplify_arguments(const Expr& e);

enum class Equivalence { Equal, ProbablyEqual, NotEqual };
Equivalence equivalent(const Expr& a, const Expr& b, std::uint64_t seed = 20240601);
const char* to_string(Equivalence v);

// ---- evaluation -------------------------------------------------------------

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys are symbol names; jets use their printed name ("u_tt").
using Assignment = std::unordered_map<std::string, double>;
double eval_numeric(const Expr& e, const Assignment& assignment);
using ExactAssignment = std::unordered_map<std::string, Rational>;
/// Exact evaluation; nullopt if a transcendental value is needed.
std::optional<Rational> eval_exact(const Expr& e, const ExactAssignment& assignment);
/// Printed key used in assignments for an atom.
std::string atom_key(const Expr& atom);

// ---- printing -----------------------------------------------------------------

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

}  // namespace beamsym
