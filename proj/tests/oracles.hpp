#pragma once

// Test-only oracles. Nothing here calls into the simplex code.

#include "capfl/lp.hpp"

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using capfl::Rational;

/// Solves a square system exactly by Gauss-Jordan. nullopt when singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a,
                                                         std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a[piv][col]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

struct DenseRow {
  std::vector<Rational> a;
  capfl::Relation rel;
  Rational b;
};

inline bool satisfies(const DenseRow& row, const std::vector<Rational>& x) {
  Rational lhs = 0;
  for (std::size_t j = 0; j < x.size(); ++j) lhs += row.a[j] * x[j];
  switch (row.rel) {
    case capfl::Relation::LessEq: return lhs <= row.b;
    case capfl::Relation::Equal: return lhs == row.b;
    case capfl::Relation::GreaterEq: return lhs >= row.b;
  }
  return false;
}

/// Minimum of c.x over a bounded polyhedron by enumerating every choice of n
/// tight rows. nullopt when no vertex is feasible.
inline std::optional<Rational> min_by_vertex_enumeration(const std::vector<DenseRow>& rows,
                                                         const std::vector<Rational>& c) {
  const std::size_t n = c.size();
  std::optional<Rational> best;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<Rational>> a;
      std::vector<Rational> b;
      for (std::size_t k : pick) {
        a.push_back(rows[k].a);
        b.push_back(rows[k].b);
      }
      auto x = solve_square(a, b);
      if (!x) return;
      for (const auto& row : rows) {
        if (!satisfies(row, *x)) return;
      }
      Rational value = 0;
      for (std::size_t j = 0; j < n; ++j) value += c[j] * (*x)[j];
      if (!best || value < *best) best = value;
      return;
    }
    for (std::size_t k = start; k < rows.size(); ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Minimum of c.x over 0-1 points satisfying all rows.
inline std::optional<Rational> min_over_binary_points(const std::vector<DenseRow>& rows,
                                                      const std::vector<Rational>& c) {
  const std::size_t n = c.size();
  std::optional<Rational> best;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Rational> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1u;
    bool ok = true;
    for (const auto& row : rows) ok = ok && satisfies(row, x);
    if (!ok) continue;
    Rational value = 0;
    for (std::size_t j = 0; j < n; ++j) value += c[j] * x[j];
    if (!best || value < *best) best = value;
  }
  return best;
}

inline capfl::LinearProgram to_lp(const std::vector<DenseRow>& rows, const std::vector<Rational>& c,
                                  bool unit_bounds) {
  capfl::LinearProgram lp;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (unit_bounds) lp.add_variable("x" + std::to_string(j), Rational(0), Rational(1));
    else lp.add_variable("x" + std::to_string(j), std::nullopt, std::nullopt);
  }
  for (const auto& row : rows) {
    std::vector<capfl::Term> terms;
    for (std::size_t j = 0; j < c.size(); ++j) terms.push_back({static_cast<int>(j), row.a[j]});
    lp.add_constraint(std::move(terms), row.rel, row.b);
  }
  std::vector<capfl::Term> obj;
  for (std::size_t j = 0; j < c.size(); ++j) obj.push_back({static_cast<int>(j), c[j]});
  lp.set_objective(std::move(obj));
  return lp;
}

inline Rational small_rational(std::mt19937_64& rng, int lo, int hi, int max_den = 3) {
  std::uniform_int_distribution<int> num(lo, hi);
  std::uniform_int_distribution<int> den(1, max_den);
  return capfl::make_rational(num(rng), den(rng));
}

/// A random 0-1 polytope in d variables: `rows` packing-style rows with small
/// integer coefficients and rhs >= 0, so the origin is always feasible.
inline std::vector<DenseRow> random_binary_polytope(std::mt19937_64& rng, std::size_t d, std::size_t rows) {
  std::uniform_int_distribution<int> coef(-1, 3);
  std::uniform_int_distribution<int> rhs(1, 4);
  std::vector<DenseRow> out;
  for (std::size_t r = 0; r < rows; ++r) {
    DenseRow row{std::vector<Rational>(d), capfl::Relation::LessEq, Rational(rhs(rng))};
    for (auto& a : row.a) a = coef(rng);
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<Rational> random_objective(std::mt19937_64& rng, std::size_t d) {
  std::vector<Rational> c(d);
  for (auto& v : c) v = small_rational(rng, -5, 5);
  return c;
}

}  // namespace oracle
