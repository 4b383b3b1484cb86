#include "beamsym/linsolve.hpp"

#include <stdexcept>

namespace beamsym {

std::vector<std::size_t> RowReduction::free_columns() const {
  std::vector<bool> is_pivot(unknowns, false);
  for (auto c : pivot_columns) is_pivot[c] = true;
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < unknowns; ++c)
    if (!is_pivot[c]) out.push_back(c);
  return out;
}

bool RowReduction::consistent() const {
  for (std::size_t r = pivot_columns.size(); r < reduced.size(); ++r) {
    for (std::size_t c = unknowns; c < reduced[r].size(); ++c)
      if (!reduced[r][c].is_zero()) return false;
  }
  return true;
}

std::vector<std::vector<Expr>> RowReduction::nullspace() const {
  std::vector<std::vector<Expr>> out;
  for (auto f : free_columns()) {
    std::vector<Expr> v(unknowns, Expr(0));
    v[f] = Expr(1);
    for (std::size_t r = 0; r < pivot_columns.size(); ++r) v[pivot_columns[r]] = -reduced[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<Expr>> RowReduction::particular() const {
  if (!consistent()) return std::nullopt;
  std::vector<Expr> v(unknowns, Expr(0));
  for (std::size_t r = 0; r < pivot_columns.size(); ++r) {
    if (reduced[r].size() > unknowns) v[pivot_columns[r]] = reduced[r][unknowns];
  }
  return v;
}

namespace {

int pivot_quality(const Expr& e, const std::function<bool(const Expr&)>& known_nonzero) {
  if (e.is_constant()) return 0;
  if (known_nonzero && known_nonzero(e)) return 1;
  return 2;
}

}  // namespace

RowReduction row_reduce(Matrix m, std::size_t unknowns, const std::function<bool(const Expr&)>& known_nonzero) {
  RowReduction out;
  out.unknowns = unknowns;
  for (auto& row : m)
    for (auto& v : row) v = simplify(v);

  std::size_t r = 0;
  for (std::size_t c = 0; c < unknowns && r < m.size(); ++c) {
    std::size_t best = m.size();
    int best_q = 3;
    for (std::size_t i = r; i < m.size(); ++i) {
      if (m[i][c].is_zero()) continue;
      const int q = pivot_quality(m[i][c], known_nonzero);
      if (q < best_q) {
        best_q = q;
        best = i;
        if (q == 0) break;
      }
    }
    if (best == m.size()) continue;
    std::swap(m[r], m[best]);
    const Expr piv = m[r][c];
    if (best_q == 2) out.nonzero_assumptions.push_back(piv);
    const Expr inv = inverse(piv);
    for (auto& v : m[r]) v = simplify(v * inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      const Expr factor = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j) {
        if (m[r][j].is_zero()) continue;
        m[i][j] = simplify(m[i][j] - factor * m[r][j]);
      }
    }
    out.pivot_columns.push_back(c);
    ++r;
  }
  // Keep pivot rows, then any rows that still carry a right-hand side.
  Matrix kept(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(r));
  for (std::size_t i = r; i < m.size(); ++i) {
    bool nonzero = false;
    for (const auto& v : m[i]) nonzero = nonzero || !v.is_zero();
    if (nonzero) kept.push_back(m[i]);
  }
  out.reduced = std::move(kept);
  return out;
}

CollectedSystem collect_linear(const Expr& e, const std::vector<Expr>& unknowns,
                               const std::function<bool(const Expr&)>& is_basis_factor) {
  std::unordered_map<Expr, std::size_t, ExprHash> index;
  for (std::size_t j = 0; j < unknowns.size(); ++j) index.emplace(unknowns[j], j);

  CollectedSystem out;
  std::unordered_map<Expr, std::size_t, ExprHash> row_of;
  std::vector<std::vector<std::vector<Expr>>> parts;  // row -> column -> summands
  const std::size_t width = unknowns.size() + 1;

  for (const auto& term : terms_of(expand(e))) {
    auto [c, rest] = split_coefficient(term);
    std::optional<std::size_t> unknown;
    std::vector<Expr> basis;
    std::vector<Expr> coeff{Expr(c)};
    for (const auto& [base, k] : factors_of(rest)) {
      auto it = index.find(base);
      if (it != index.end()) {
        if (unknown || !k.is_one()) throw std::invalid_argument("system is not linear in the unknowns");
        unknown = it->second;
        continue;
      }
      const Expr f = pow(base, k);
      if (is_basis_factor(f))
        basis.push_back(f);
      else
        coeff.push_back(f);
    }
    const Expr key = mul(std::move(basis));
    auto [it, inserted] = row_of.emplace(key, out.keys.size());
    if (inserted) {
      out.keys.push_back(key);
      parts.emplace_back(width);
    }
    const std::size_t col = unknown ? *unknown : unknowns.size();
    Expr value = mul(std::move(coeff));
    if (!unknown) value = -value;
    parts[it->second][col].push_back(value);
  }
  for (auto& row : parts) {
    std::vector<Expr> r;
    r.reserve(width);
    for (auto& cell : row) r.push_back(add(std::move(cell)));
    out.rows.push_back(std::move(r));
  }
  return out;
}

Matrix stack(const std::vector<CollectedSystem>& systems) {
  Matrix m;
  for (const auto& s : systems) m.insert(m.end(), s.rows.begin(), s.rows.end());
  return m;
}

}  // namespace beamsym
