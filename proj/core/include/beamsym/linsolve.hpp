#pragma once

// Exact Gauss-Jordan elimination over rational functions of parameters.

#include "beamsym/expr.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace beamsym {

using Matrix = std::vector<std::vector<Expr>>;

struct RowReduction {
  Matrix reduced;                           // reduced row echelon form, zero rows dropped
  std::vector<std::size_t> pivot_columns;   // pivot column of each row
  std::vector<Expr> nonzero_assumptions;    // non-constant pivots taken to be nonzero
  std::size_t unknowns = 0;                 // number of coefficient columns

  std::size_t rank() const { return pivot_columns.size(); }
  std::vector<std::size_t> free_columns() const;
  /// False when an augmented system has a row 0 = nonzero.
  bool consistent() const;
  /// Null-space basis, one vector per free column (free entry = 1).
  std::vector<std::vector<Expr>> nullspace() const;
  /// Solution of the augmented system with every free unknown set to 0.
  std::optional<std::vector<Expr>> particular() const;
};

/// Row-reduces `m`. Only the first `unknowns` columns are pivot candidates; any
/// further columns are carried along as right-hand sides. Constant pivots are
/// preferred, then entries satisfying `known_nonzero`, then any nonzero entry
/// (recorded in nonzero_assumptions).
RowReduction row_reduce(Matrix m, std::size_t unknowns,
                        const std::function<bool(const Expr&)>& known_nonzero = {});

/// Linear equations obtained by collecting `e` over basis monomials.
struct CollectedSystem {
  std::vector<Expr> keys;  // basis monomial of each equation
  Matrix rows;             // rows[k][j] = coefficient of unknowns[j]; last column = -constant part
};

/// Expands `e`, which must be linear in `unknowns`, and groups terms by the
/// product of their factors that satisfy `is_basis_factor`. Remaining factors
/// form the coefficients.
CollectedSystem collect_linear(const Expr& e, const std::vector<Expr>& unknowns,
                               const std::function<bool(const Expr&)>& is_basis_factor);

/// Stacks several collected systems (same unknowns) into one matrix.
Matrix stack(const std::vector<CollectedSystem>& systems);

}  // namespace beamsym
