// Exact bounded-variable primal simplex.
//
// Computational form: every row i gets a logical r_i with A_i x - r_i = 0 and
// bounds taken from the relation; rows whose logical starts out of bounds get
// an artificial column. Phase 1 minimizes the artificials, phase 2 the user
// objective. The basis inverse is kept in product form (eta file) over a
// diagonal start and rebuilt every `refactor_every` pivots. Ties in the ratio
// test go to the smallest variable id, so the pivot sequence is a pure
// function of the LP and the options.

#include "capfl/error.hpp"
#include "capfl/lp.hpp"

#include <algorithm>
#include <stdexcept>
#include <numeric>
#include <optional>

namespace capfl {

namespace {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };

struct Eta {
  int pos;
  Rational diag;
  std::vector<std::pair<int, Rational>> off;  // (position, coefficient), position != pos
};

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& options) : lp_(lp), options_(options) {
    if (lp.num_nonzeros() > options.max_nonzeros) {
      throw SizeLimitError("LP has " + std::to_string(lp.num_nonzeros()) + " nonzeros; cap is " +
                           std::to_string(options.max_nonzeros));
    }
    build();
  }

  SolveOutcome run() {
    SolveOutcome out;
    if (num_artificial_ > 0) {
      std::vector<Rational> phase1(static_cast<std::size_t>(n_total_));
      for (int v = first_artificial_; v < n_total_; ++v) phase1[static_cast<std::size_t>(v)] = 1;
      iterate(phase1, out.iterations);
      for (int v = first_artificial_; v < n_total_; ++v) {
        if (sgn(x_[static_cast<std::size_t>(v)]) != 0) {
          out.status = SolveStatus::Infeasible;
          return out;
        }
        up_[static_cast<std::size_t>(v)] = Rational(0);
      }
    }
    std::vector<Rational> phase2(static_cast<std::size_t>(n_total_));
    for (const Term& t : lp_.objective()) {
      phase2[static_cast<std::size_t>(t.var)] = lp_.sense() == Sense::Minimize ? t.coef : Rational(-t.coef);
    }
    if (!iterate(phase2, out.iterations)) {
      out.status = SolveStatus::Unbounded;
      return out;
    }
    out.status = SolveStatus::Optimal;
    out.point.assign(x_.begin(), x_.begin() + n_struct_);
    out.value = lp_.evaluate_objective(out.point);
    out.duals.resize(idx(m_));
    for (int p = 0; p < m_; ++p) out.duals[idx(p)] = phase2[idx(head_[idx(p)])];
    btran(out.duals);
    return out;
  }

 private:
  std::size_t idx(int v) const { return static_cast<std::size_t>(v); }

  void build() {
    n_struct_ = lp_.num_variables();
    m_ = lp_.num_constraints();
    cols_.assign(idx(n_struct_), {});
    for (int i = 0; i < m_; ++i) {
      for (const Term& t : lp_.constraint(i).terms) cols_[idx(t.var)].emplace_back(i, t.coef);
    }
    for (int v = 0; v < n_struct_; ++v) {
      lo_.push_back(lp_.variable(v).lower);
      up_.push_back(lp_.variable(v).upper);
    }
    // logicals
    for (int i = 0; i < m_; ++i) {
      const Constraint& c = lp_.constraint(i);
      cols_.push_back({{i, Rational(-1)}});
      lo_.push_back(c.rel == Relation::LessEq ? std::nullopt : std::optional<Rational>(c.rhs));
      up_.push_back(c.rel == Relation::GreaterEq ? std::nullopt : std::optional<Rational>(c.rhs));
    }
    x_.assign(idx(n_struct_ + m_), Rational(0));
    state_.assign(idx(n_struct_ + m_), VarState::AtLower);
    for (int v = 0; v < n_struct_; ++v) {
      if (lo_[idx(v)]) {
        x_[idx(v)] = *lo_[idx(v)];
        state_[idx(v)] = VarState::AtLower;
      } else if (up_[idx(v)]) {
        x_[idx(v)] = *up_[idx(v)];
        state_[idx(v)] = VarState::AtUpper;
      } else {
        state_[idx(v)] = VarState::FreeZero;
      }
    }
    std::vector<Rational> activity(idx(m_), Rational(0));
    for (int v = 0; v < n_struct_; ++v) {
      if (sgn(x_[idx(v)]) == 0) continue;
      for (const auto& [row, coef] : cols_[idx(v)]) activity[idx(row)] += coef * x_[idx(v)];
    }
    head_.assign(idx(m_), -1);
    diag_inv_.assign(idx(m_), Rational(1));
    first_artificial_ = n_struct_ + m_;
    std::vector<std::pair<int, Rational>> artificials;  // (row, sigma)
    for (int i = 0; i < m_; ++i) {
      int logical = n_struct_ + i;
      const Rational& a = activity[idx(i)];
      const auto& l = lo_[idx(logical)];
      const auto& u = up_[idx(logical)];
      if ((!l || a >= *l) && (!u || a <= *u)) {
        x_[idx(logical)] = a;
        state_[idx(logical)] = VarState::Basic;
        head_[idx(i)] = logical;
        diag_inv_[idx(i)] = -1;
        continue;
      }
      Rational bound = (l && a < *l) ? *l : *u;
      x_[idx(logical)] = bound;
      state_[idx(logical)] = (l && bound == *l) ? VarState::AtLower : VarState::AtUpper;
      Rational gap = bound - a;  // sigma * t = r_i - A_i x
      Rational sigma = sgn(gap) > 0 ? 1 : -1;
      artificials.emplace_back(i, sigma);
      int art = first_artificial_ + static_cast<int>(artificials.size()) - 1;
      cols_.push_back({{i, sigma}});
      lo_.push_back(Rational(0));
      up_.push_back(std::nullopt);
      x_.push_back(abs(gap));
      state_.push_back(VarState::Basic);
      head_[idx(i)] = art;
      diag_inv_[idx(i)] = 1 / sigma;
    }
    num_artificial_ = static_cast<int>(artificials.size());
    n_total_ = first_artificial_ + num_artificial_;
    work_.assign(idx(m_), Rational(0));
  }

  void ftran(std::vector<Rational>& v) const {
    for (int p = 0; p < m_; ++p) {
      if (sgn(v[idx(p)]) != 0 && diag_inv_[idx(p)] != 1) v[idx(p)] *= diag_inv_[idx(p)];
    }
    Rational t;
    for (const Eta& e : etas_) {
      if (sgn(v[idx(e.pos)]) == 0) continue;
      t = v[idx(e.pos)];
      v[idx(e.pos)] = e.diag * t;
      for (const auto& [p, coef] : e.off) v[idx(p)] += coef * t;
    }
  }

  void btran(std::vector<Rational>& w) const {
    Rational acc;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      acc = w[idx(it->pos)] * it->diag;
      for (const auto& [p, coef] : it->off) {
        if (sgn(w[idx(p)]) != 0) acc += w[idx(p)] * coef;
      }
      w[idx(it->pos)] = acc;
    }
    for (int p = 0; p < m_; ++p) {
      if (sgn(w[idx(p)]) != 0 && diag_inv_[idx(p)] != 1) w[idx(p)] *= diag_inv_[idx(p)];
    }
  }

  void load_column(int v, std::vector<Rational>& dense) const {
    std::fill(dense.begin(), dense.end(), Rational(0));
    for (const auto& [row, coef] : cols_[idx(v)]) dense[idx(row)] = coef;
  }

  void push_eta(int pos, const std::vector<Rational>& alpha) {
    Eta e;
    e.pos = pos;
    e.diag = 1 / alpha[idx(pos)];
    for (int p = 0; p < m_; ++p) {
      if (p == pos || sgn(alpha[idx(p)]) == 0) continue;
      e.off.emplace_back(p, -alpha[idx(p)] * e.diag);
    }
    etas_.push_back(std::move(e));
  }

  bool is_unit_column(int v) const { return v >= n_struct_; }

  void reinvert() {
    etas_.clear();
    std::vector<int> basic(head_.begin(), head_.end());
    std::fill(head_.begin(), head_.end(), -1);
    std::fill(diag_inv_.begin(), diag_inv_.end(), Rational(1));
    std::vector<int> structural;
    for (int v : basic) {
      if (is_unit_column(v)) {
        const auto& [row, coef] = cols_[idx(v)].front();
        head_[idx(row)] = v;
        diag_inv_[idx(row)] = 1 / coef;
      } else {
        structural.push_back(v);
      }
    }
    std::stable_sort(structural.begin(), structural.end(),
                     [&](int a, int b) { return cols_[idx(a)].size() < cols_[idx(b)].size(); });
    std::vector<Rational>& alpha = work_;
    for (int v : structural) {
      load_column(v, alpha);
      ftran(alpha);
      int pos = -1;
      for (int p = 0; p < m_; ++p) {
        if (head_[idx(p)] == -1 && sgn(alpha[idx(p)]) != 0) {
          pos = p;
          break;
        }
      }
      if (pos < 0) throw std::logic_error("simplex: singular basis during reinversion");
      push_eta(pos, alpha);
      head_[idx(pos)] = v;
    }
  }

  bool eligible(int v, const Rational& d, int& dir) const {
    if (state_[idx(v)] == VarState::Basic) return false;
    int s = sgn(d);
    if (s == 0) return false;
    const auto& u = up_[idx(v)];
    const auto& l = lo_[idx(v)];
    if (s < 0) {
      if (u && x_[idx(v)] >= *u) return false;
      dir = 1;
      return true;
    }
    if (l && x_[idx(v)] <= *l) return false;
    dir = -1;
    return true;
  }

  // Returns false when the objective is unbounded below.
  bool iterate(const std::vector<Rational>& cost, long& iterations) {
    std::vector<Rational> y(idx(m_));
    std::vector<Rational>& alpha = work_;
    Rational d;
    Rational best_d;
    Rational best_theta;
    Rational theta;
    for (;;) {
      if (++iterations > options_.max_iterations) {
        throw SizeLimitError("simplex iteration limit reached (" + std::to_string(options_.max_iterations) + ")");
      }
      for (int p = 0; p < m_; ++p) y[idx(p)] = cost[idx(head_[idx(p)])];
      btran(y);

      // Dantzig pricing (largest |d|, lowest index on ties) until a run of
      // degenerate pivots; Bland's rule from then until the next step of
      // positive length. Cycling needs an endless degenerate run, which
      // Bland's rule excludes.
      const bool bland = options_.pivot == PivotRule::Bland || degenerate_run_ >= options_.degenerate_limit;
      int entering = -1;
      int dir = 0;
      int cand_dir = 0;
      for (int v = 0; v < n_total_; ++v) {
        if (state_[idx(v)] == VarState::Basic) continue;
        d = cost[idx(v)];
        for (const auto& [row, coef] : cols_[idx(v)]) {
          if (sgn(y[idx(row)]) != 0) d -= y[idx(row)] * coef;
        }
        if (!eligible(v, d, cand_dir)) continue;
        if (bland) {
          entering = v;
          dir = cand_dir;
          break;
        }
        if (entering < 0 || cmp(abs(d), best_d) > 0) {
          entering = v;
          dir = cand_dir;
          best_d = abs(d);
        }
      }
      if (entering < 0) return true;

      load_column(entering, alpha);
      ftran(alpha);

      // Ratio test. Candidates: each basic variable moving toward a bound, and
      // the entering variable reaching its opposite bound.
      int leave_pos = -1;
      int leave_var = -1;
      bool bounded = false;
      bool leave_to_upper = false;
      const auto& el = lo_[idx(entering)];
      const auto& eu = up_[idx(entering)];
      if (dir > 0 && eu) {
        best_theta = *eu - x_[idx(entering)];
        bounded = true;
        leave_var = entering;
      } else if (dir < 0 && el) {
        best_theta = x_[idx(entering)] - *el;
        bounded = true;
        leave_var = entering;
      }
      for (int p = 0; p < m_; ++p) {
        int s = sgn(alpha[idx(p)]);
        if (s == 0) continue;
        int b = head_[idx(p)];
        // basic value changes at rate -dir * alpha_p per unit step
        bool increasing = (s * dir) < 0;
        const auto& bound = increasing ? up_[idx(b)] : lo_[idx(b)];
        if (!bound) continue;
        theta = (*bound - x_[idx(b)]) / alpha[idx(p)];
        if (dir > 0) theta = -theta;
        bool better = !bounded || theta < best_theta || (theta == best_theta && b < leave_var);
        if (better) {
          best_theta = theta;
          bounded = true;
          leave_var = b;
          leave_pos = p;
          leave_to_upper = increasing;
        }
      }
      if (!bounded) return false;
      if (leave_var == entering) leave_pos = -1;

      // Update values.
      degenerate_run_ = sgn(best_theta) == 0 ? degenerate_run_ + 1 : 0;
      if (sgn(best_theta) != 0) {
        Rational step = dir > 0 ? best_theta : Rational(-best_theta);
        x_[idx(entering)] += step;
        for (int p = 0; p < m_; ++p) {
          if (sgn(alpha[idx(p)]) != 0) x_[idx(head_[idx(p)])] -= alpha[idx(p)] * step;
        }
      }
      if (leave_pos < 0) {
        state_[idx(entering)] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        x_[idx(entering)] = dir > 0 ? *eu : *el;
        continue;
      }
      int leaving = head_[idx(leave_pos)];
      x_[idx(leaving)] = leave_to_upper ? *up_[idx(leaving)] : *lo_[idx(leaving)];
      state_[idx(leaving)] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      state_[idx(entering)] = VarState::Basic;
      head_[idx(leave_pos)] = entering;
      push_eta(leave_pos, alpha);
      if (++pivots_since_reinvert_ >= options_.refactor_every) {
        reinvert();
        pivots_since_reinvert_ = 0;
      }
    }
  }

  const LinearProgram& lp_;
  SolveOptions options_;
  int n_struct_ = 0;
  int m_ = 0;
  int n_total_ = 0;
  int first_artificial_ = 0;
  int num_artificial_ = 0;
  int pivots_since_reinvert_ = 0;
  int degenerate_run_ = 0;
  std::vector<std::vector<std::pair<int, Rational>>> cols_;
  std::vector<std::optional<Rational>> lo_;
  std::vector<std::optional<Rational>> up_;
  std::vector<Rational> x_;
  std::vector<VarState> state_;
  std::vector<int> head_;
  std::vector<Rational> diag_inv_;
  std::vector<Eta> etas_;
  std::vector<Rational> work_;
};

}  // namespace

SolveOutcome solve_primal(const LinearProgram& lp, const SolveOptions& options) {
  Simplex simplex(lp, options);
  return simplex.run();
}

namespace {

bool boxed_from_zero(const LinearProgram& lp) {
  for (const Variable& v : lp.variables()) {
    if (!v.lower || sgn(*v.lower) != 0 || !v.upper) return false;
  }
  return true;
}

}  // namespace

// For min c.x, A_i x (rel) b_i, 0 <= x <= u the dual is
//   max b.pi + u.mu  s.t.  A^T pi + mu <= c,  mu <= 0,
// with pi_i >= 0 on >= rows, <= 0 on <= rows, free on = rows. The primal
// point is read off the dual's row multipliers as x = -y, then checked.
SolveOutcome solve_dual(const LinearProgram& lp, const SolveOptions& options) {
  if (!boxed_from_zero(lp)) throw InputError("dual route needs every variable in [0, u]");
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  const bool maximize = lp.sense() == Sense::Maximize;
  std::vector<Rational> c(static_cast<std::size_t>(n));
  for (const Term& t : lp.objective()) c[static_cast<std::size_t>(t.var)] = maximize ? Rational(-t.coef) : t.coef;

  LinearProgram dual;
  std::vector<std::vector<Term>> rows(static_cast<std::size_t>(n));
  std::vector<Term> objective;
  for (int i = 0; i < m; ++i) {
    const Constraint& con = lp.constraint(i);
    std::optional<Rational> lo;
    std::optional<Rational> up;
    if (con.rel == Relation::GreaterEq) lo = Rational(0);
    if (con.rel == Relation::LessEq) up = Rational(0);
    int pi = dual.add_variable("pi" + std::to_string(i), lo, up);
    for (const Term& t : con.terms) rows[static_cast<std::size_t>(t.var)].push_back({pi, t.coef});
    if (sgn(con.rhs) != 0) objective.push_back({pi, con.rhs});
  }
  for (int j = 0; j < n; ++j) {
    int mu = dual.add_variable("mu" + std::to_string(j), std::nullopt, Rational(0));
    rows[static_cast<std::size_t>(j)].push_back({mu, 1});
    if (sgn(*lp.variable(j).upper) != 0) objective.push_back({mu, *lp.variable(j).upper});
  }
  for (int j = 0; j < n; ++j) dual.add_constraint(std::move(rows[static_cast<std::size_t>(j)]), Relation::LessEq, c[static_cast<std::size_t>(j)]);
  dual.set_objective(std::move(objective), Sense::Maximize);

  SolveOptions dual_options = options;
  dual_options.degenerate_limit = options.dual_degenerate_limit;
  SolveOutcome d = solve_primal(dual, dual_options);
  SolveOutcome out;
  out.iterations = d.iterations;
  if (!d.optimal()) {
    // A feasible boxed primal has an optimum, so its dual is feasible and bounded.
    out.status = SolveStatus::Infeasible;
    return out;
  }
  out.point.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out.point[static_cast<std::size_t>(j)] = -d.duals[static_cast<std::size_t>(j)];
  Rational primal_min = 0;
  for (int j = 0; j < n; ++j) primal_min += c[static_cast<std::size_t>(j)] * out.point[static_cast<std::size_t>(j)];
  if (!check_point(lp, out.point).empty() || primal_min != d.value) {
    throw std::logic_error("dual route produced a point without an optimality certificate");
  }
  out.status = SolveStatus::Optimal;
  out.value = lp.evaluate_objective(out.point);
  return out;
}

SolveOutcome solve(const LinearProgram& lp, const SolveOptions& options) {
  switch (options.method) {
    case SolveMethod::Primal: return solve_primal(lp, options);
    case SolveMethod::Dual: return solve_dual(lp, options);
    case SolveMethod::Auto: break;
  }
  if (lp.num_constraints() > 2 * lp.num_variables() && boxed_from_zero(lp)) return solve_dual(lp, options);
  return solve_primal(lp, options);
}

}  // namespace capfl
