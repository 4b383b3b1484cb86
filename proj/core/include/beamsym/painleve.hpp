#pragma once

// ARS singularity analysis of polynomial ODEs: dominant balances, resonances,
// Painleve series with compatibility checks, and the integrability verdict.

#include "beamsym/reduce.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsym::painleve {

class PainleveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE cleared to a polynomial in x, y, y', ... with parameter coefficients.
struct PolynomialOde {
  std::string independent = "x";
  std::string dependent = "y";
  int order = 0;
  Expr expansion_point = Expr::parameter("x0");  // symbol or exact rational
  /// Key: power of each derivative y^(j), j = 0..order. Value: coefficient polynomial in x.
  std::map<std::vector<int>, Expr> groups;

  Expr equation() const;
};

/// Clears denominators and checks that the ODE is polynomial.
PolynomialOde to_polynomial(const reduce::OdeModel& ode);

/// Roots of a polynomial over Q; factors without rational roots are kept as `remainder`.
struct RationalRoots {
  std::vector<Rational> roots;      // ascending, with multiplicity
  std::vector<Rational> remainder;  // coefficients, constant term first; empty or degree >= 2
  bool complete() const { return remainder.empty(); }
};
RationalRoots rational_roots(std::vector<Rational> coefficients);

struct Balance {
  Rational p;                   // y ~ a*z^p, z = x - x0
  Rational exponent;            // z-power of the dominant terms
  Expr polynomial;              // leading-coefficient polynomial in the symbol a
  Expr content;                 // its leading coefficient, free of a
  RationalRoots roots;          // roots of polynomial/content, including a = 0
  std::vector<Rational> retained;  // nonzero rational roots
};

/// Newton-polygon balances. Non-pole exponents (p >= 0) are dropped unless requested.
std::vector<Balance> dominant_balance(const PolynomialOde& ode, bool include_nonpole = false);

struct Resonances {
  Expr polynomial;  // in the symbol s
  RationalRoots roots;
};
Resonances resonances(const PolynomialOde& ode, const Rational& p, const Rational& a);

enum class SeriesClass { Right, Left, Mixed };
std::string to_string(SeriesClass c);
/// Throws PainleveError when -1 is missing or repeated.
SeriesClass classify_series(const std::vector<Rational>& roots);

/// y = sum_k c_k z^(p+k), k = 0..order.
struct LaurentSeries {
  Expr x0;
  Rational p;
  std::vector<Expr> coefficients;
  int order = 0;
  std::vector<Expr> free_constants;  // at resonance positions

  /// Truncated series as an expression in z.
  Expr to_expr(const Expr& z) const;
};

struct SeriesResult {
  LaurentSeries series;
  std::vector<Expr> residuals;        // coefficient of z^(exponent+k), all zero when consistent
  std::vector<int> resonance_orders;  // positive integer resonances inside the truncation
  int consistent_through = -1;
  std::optional<int> failed_resonance;
};

/// Ascending series with free constants F_{k-1} at resonance positions k.
SeriesResult build_series(const PolynomialOde& ode, const Rational& p, const Rational& a, int order);

struct BalanceReport {
  Rational p;
  Rational a;
  std::vector<Rational> resonances;
  bool rational_resonances = true;
  std::optional<SeriesClass> series_class;
  std::string status;  // consistent, fails at resonance r, constructed but not consistency-checked, ...
  std::optional<SeriesResult> series;
};

struct ResonanceReport {
  std::vector<Balance> balances;
  std::vector<BalanceReport> branches;
  std::vector<std::string> flags;
  std::string verdict;

  std::string to_json() const;
};

ResonanceReport painleve_test(const reduce::OdeModel& ode, int order = 8);
ResonanceReport painleve_test(const PolynomialOde& ode, int order = 8);

/// eq02g, eq02h, eq02i (with alpha*beta written as nu) and ll01 (affine source).
std::vector<std::string> registry_names();
reduce::OdeModel registry_ode(const std::string& name);

/// Derived against tabulated series coefficient of the right branch of eq02i.
struct CoefficientCheck {
  std::string name;  // "F2", "F3"
  Expr derived;
  Expr printed;      // in nu, x0, F0, F1 with the leading coefficient written F0
  Equivalence equivalence = Equivalence::NotEqual;
  Expr difference;   // simplified derived - printed
};
/// F2 and F3 of the a = 1 branch of eq02i against their tabulated relations.
std::vector<CoefficientCheck> check_tabulated_coefficients(int order = 8);

}  // namespace beamsym::painleve
