#include "capfl/sa.hpp"

#include "capfl/error.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace capfl {

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::string to_string(const Monomial& m) {
  std::string s = "x{";
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(m[k]);
  }
  return s + "}";
}

LiftedConstraint lift_constraint(const Constraint& c, const Multiplier& m) {
  // pi(x) = sum a_v x_v - b, in <= form.
  const bool flip = c.rel == Relation::GreaterEq;
  std::vector<Term> terms = c.terms;
  Rational b = c.rhs;
  if (flip) {
    for (Term& t : terms) t.coef = -t.coef;
    b = -b;
  }
  Monomial fixed;
  std::set_difference(m.u.begin(), m.u.end(), m.w.begin(), m.w.end(), std::back_inserter(fixed));

  std::map<Monomial, Rational> acc;
  const std::size_t nw = m.w.size();
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << nw); ++t) {
    Monomial s = fixed;
    int parity = 0;
    for (std::size_t k = 0; k < nw; ++k) {
      if ((t >> k) & 1u) {
        s.push_back(m.w[k]);
        ++parity;
      }
    }
    std::sort(s.begin(), s.end());
    const int sign = (parity % 2) ? -1 : 1;
    for (const Term& term : terms) {
      acc[multiply(s, Monomial{term.var})] += sign * term.coef;
    }
    acc[s] -= sign * b;
  }
  LiftedConstraint out;
  out.rel = c.rel == Relation::Equal ? Relation::Equal : Relation::LessEq;
  for (auto& [mono, coef] : acc) {
    if (mono.empty()) {
      out.rhs = -coef;
    } else if (sgn(coef) != 0) {
      out.terms.push_back({mono, coef});
    }
  }
  return out;
}

std::vector<Multiplier> all_multipliers(int d, int k) {
  std::vector<Multiplier> out;
  std::vector<int> u;
  std::function<void(int, int)> rec = [&](int start, int size) {
    if (static_cast<int>(u.size()) == size) {
      for (std::uint64_t t = 0; t < (std::uint64_t{1} << size); ++t) {
        Multiplier m{u, {}};
        for (int b = 0; b < size; ++b) {
          if ((t >> b) & 1u) m.w.push_back(u[static_cast<std::size_t>(b)]);
        }
        out.push_back(std::move(m));
      }
      return;
    }
    for (int v = start; v < d; ++v) {
      u.push_back(v);
      rec(v + 1, size);
      u.pop_back();
    }
  };
  for (int size = 0; size <= std::min(k, d); ++size) rec(0, size);
  // Within one U the loop above lists W by bitmask; order W lexicographically.
  std::stable_sort(out.begin(), out.end(), [](const Multiplier& a, const Multiplier& b) {
    if (a.u.size() != b.u.size()) return a.u.size() < b.u.size();
    return a < b;
  });
  return out;
}

int LiftedSystem::var(const Monomial& m) const {
  auto it = index.find(m);
  if (it == index.end()) throw InputError("monomial " + to_string(m) + " is not in the lifted system");
  return it->second;
}

namespace {

using RowKey = std::pair<std::vector<std::pair<int, Rational>>, std::pair<int, Rational>>;

void add_unique(LinearProgram& lp, std::set<RowKey>& seen, std::vector<Term> terms, Relation rel, Rational rhs) {
  RowKey key;
  for (const Term& t : terms) key.first.emplace_back(t.var, t.coef);
  key.second = {static_cast<int>(rel), rhs};
  if (!seen.insert(std::move(key)).second) return;
  lp.add_constraint(std::move(terms), rel, std::move(rhs));
}

bool holds(const Rational& lhs, Relation rel, const Rational& rhs) {
  switch (rel) {
    case Relation::LessEq: return lhs <= rhs;
    case Relation::Equal: return lhs == rhs;
    case Relation::GreaterEq: return lhs >= rhs;
  }
  return false;
}

}  // namespace

LinearProgram LiftedSystem::to_lp(const std::vector<Term>& objective, Sense sense) const {
  LinearProgram lp;
  for (const Monomial& m : monomials) lp.add_variable(to_string(m), Rational(0), Rational(1));
  std::set<RowKey> seen;
  for (const LiftedConstraint& c : constraints) {
    std::vector<Term> terms;
    for (const LiftedTerm& t : c.terms) terms.push_back({var(t.mono), t.coef});
    add_unique(lp, seen, std::move(terms), c.rel, c.rhs);
  }
  std::vector<Term> obj;
  for (const Term& t : objective) obj.push_back({singleton(t.var), t.coef});
  lp.set_objective(std::move(obj), sense);
  return lp;
}

std::string LiftedSystem::dump() const {
  std::ostringstream out;
  out << "# level " << level << ", " << monomials.size() << " extension variables, " << constraints.size()
      << " lifted constraints\n";
  for (std::size_t k = 0; k < monomials.size(); ++k) out << "# var " << k << " = " << to_string(monomials[k]) << "\n";
  out << to_lp_text(to_lp());
  return out.str();
}

LiftedSystem build_sa(const LinearProgram& base, int k, const SaOptions& options) {
  if (k < 0) throw InputError("SA level must be >= 0");
  const int d = base.num_variables();
  LiftedSystem sys;
  sys.level = k;
  sys.base_vars = d;
  sys.base_rows = base.constraints();
  for (int v = 0; v < d; ++v) {
    const Variable& var = base.variable(v);
    if (!var.lower || !var.upper || *var.lower != 0 || *var.upper != 1) {
      throw InputError("SA lifting needs 0 <= " + var.name + " <= 1");
    }
  }
  for (int v = 0; v < d; ++v) {
    sys.base_rows.push_back({{{v, 1}}, Relation::GreaterEq, 0, "lb " + base.variable(v).name});
    sys.base_rows.push_back({{{v, 1}}, Relation::LessEq, 1, "ub " + base.variable(v).name});
  }
  const std::vector<Multiplier> mults = all_multipliers(d, k);

  // Upper bound on lifted nonzeros, checked before any expansion.
  double estimate = 0;
  for (const Multiplier& m : mults) {
    for (const Constraint& c : sys.base_rows) {
      estimate += static_cast<double>(c.terms.size() + 1) * static_cast<double>(std::uint64_t{1} << m.w.size());
    }
  }
  if (estimate > static_cast<double>(options.max_nonzeros)) {
    throw SizeLimitError("SA level " + std::to_string(k) + " needs up to " + std::to_string(static_cast<long long>(estimate)) +
                         " nonzeros; cap is " + std::to_string(options.max_nonzeros));
  }

  const std::size_t rows = sys.base_rows.size();
  const std::size_t tasks = rows * mults.size();
  sys.constraints.resize(tasks);
  sys.provenance.resize(tasks);
  auto lift_one = [&](std::size_t t) {
    const std::size_t r = t / mults.size();
    const std::size_t m = t % mults.size();
    sys.constraints[t] = lift_constraint(sys.base_rows[r], mults[m]);
    sys.provenance[t] = {static_cast<int>(r), mults[m]};
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long t = 0; t < static_cast<long>(tasks); ++t) lift_one(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < tasks; ++t) lift_one(t);
  }

  std::set<Monomial> monos;
  for (int v = 0; v < d; ++v) monos.insert(Monomial{v});
  for (const LiftedConstraint& c : sys.constraints) {
    for (const LiftedTerm& t : c.terms) monos.insert(t.mono);
  }
  sys.monomials.assign(monos.begin(), monos.end());
  std::stable_sort(sys.monomials.begin(), sys.monomials.end(),
                   [](const Monomial& a, const Monomial& b) { return a.size() < b.size(); });
  for (std::size_t i = 0; i < sys.monomials.size(); ++i) sys.index.emplace(sys.monomials[i], static_cast<int>(i));
  return sys;
}

SolveOutcome sa_optimize(const LinearProgram& base, int k, const SaOptions& options) {
  LiftedSystem sys = build_sa(base, k, options);
  LinearProgram lp = sys.to_lp(base.objective(), base.sense());
  SolveOutcome out = solve(lp, options.lp);
  if (out.optimal()) {
    std::vector<Rational> projected(static_cast<std::size_t>(base.num_variables()));
    for (int v = 0; v < base.num_variables(); ++v) projected[static_cast<std::size_t>(v)] = out.point[static_cast<std::size_t>(sys.singleton(v))];
    out.point = std::move(projected);
  }
  return out;
}

Membership sa_membership(const LiftedSystem& sys, const std::vector<Rational>& point, const SolveOptions& options) {
  if (point.size() != static_cast<std::size_t>(sys.base_vars)) {
    throw InputError("point has " + std::to_string(point.size()) + " entries; base has " +
                     std::to_string(sys.base_vars) + " variables");
  }
  const int n = static_cast<int>(sys.monomials.size());
  Rational constant;
  {
    // The product witness x_I = prod_{i in I} point_i certifies every 0-1 point.
    Membership m;
    m.witness.resize(static_cast<std::size_t>(n));
    for (int e = 0; e < n; ++e) {
      Rational p = 1;
      for (int v : sys.monomials[static_cast<std::size_t>(e)]) p *= point[static_cast<std::size_t>(v)];
      m.witness[static_cast<std::size_t>(e)] = p;
    }
    bool ok = true;
    for (const LiftedConstraint& c : sys.constraints) {
      constant = 0;
      for (const LiftedTerm& t : c.terms) constant += t.coef * m.witness[static_cast<std::size_t>(sys.var(t.mono))];
      if (!holds(constant, c.rel, c.rhs)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      m.member = true;
      return m;
    }
  }
  // Non-singleton monomials become LP variables.

  std::vector<int> lp_var(static_cast<std::size_t>(n), -1);
  LinearProgram lp;
  for (int e = 0; e < n; ++e) {
    if (sys.monomials[static_cast<std::size_t>(e)].size() >= 2) {
      lp_var[static_cast<std::size_t>(e)] = lp.add_variable(to_string(sys.monomials[static_cast<std::size_t>(e)]), Rational(0), Rational(1));
    }
  }
  std::set<RowKey> seen;
  for (const LiftedConstraint& c : sys.constraints) {
    constant = 0;
    std::vector<Term> terms;
    for (const LiftedTerm& t : c.terms) {
      if (t.mono.size() == 1) {
        constant += t.coef * point[static_cast<std::size_t>(t.mono.front())];
      } else {
        terms.push_back({lp_var[static_cast<std::size_t>(sys.var(t.mono))], t.coef});
      }
    }
    if (terms.empty()) {
      if (!holds(constant, c.rel, c.rhs)) return {};
      continue;
    }
    add_unique(lp, seen, std::move(terms), c.rel, c.rhs - constant);
  }
  SolveOutcome out = solve(lp, options);
  if (!out.optimal()) return {};

  Membership m;
  m.member = true;
  m.witness.resize(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    const Monomial& mono = sys.monomials[static_cast<std::size_t>(e)];
    m.witness[static_cast<std::size_t>(e)] = mono.size() == 1 ? point[static_cast<std::size_t>(mono.front())]
                                                               : out.point[static_cast<std::size_t>(lp_var[static_cast<std::size_t>(e)])];
  }
  for (const LiftedConstraint& c : sys.constraints) {
    constant = 0;
    for (const LiftedTerm& t : c.terms) constant += t.coef * m.witness[static_cast<std::size_t>(sys.var(t.mono))];
    if (!holds(constant, c.rel, c.rhs)) throw std::logic_error("SA witness violates a lifted constraint");
  }
  return m;
}

Membership sa_membership(const LinearProgram& base, int k, const std::vector<Rational>& point,
                         const SaOptions& options) {
  if (point.size() != static_cast<std::size_t>(base.num_variables())) {
    throw InputError("point has " + std::to_string(point.size()) + " entries; base has " +
                     std::to_string(base.num_variables()) + " variables");
  }
  return sa_membership(build_sa(base, k, options), point, options.lp);
}

void Decomposition::validate() const {
  if (atoms.empty()) throw InputError("decomposition has no points");
  Rational total = 0;
  for (const Atom& a : atoms) {
    if (sgn(a.weight) <= 0) throw InputError("decomposition weights must be positive");
    if (a.point.size() != atoms.front().point.size()) throw InputError("decomposition points differ in dimension");
    total += a.weight;
  }
  if (total != 1) throw InputError("decomposition weights sum to " + to_string(total) + ", not 1");
}

Rational event_probability(const Decomposition& d, const Monomial& event) {
  Rational p = 0;
  for (const auto& a : d.atoms) {
    bool all = true;
    for (int v : event) {
      if (v < 0 || static_cast<std::size_t>(v) >= a.point.size()) {
        throw InputError("event variable " + std::to_string(v) + " is outside the point");
      }
      all = all && a.point[static_cast<std::size_t>(v)] == 1;
    }
    if (all) p += a.weight;
  }
  return p;
}

std::vector<ConsistencyMismatch> check_local_consistency(const LiftedSystem& sys,
                                                         const std::vector<LocalAssignment>& assignments) {
  std::vector<std::vector<Monomial>> shared(assignments.size());
  for (std::size_t a = 0; a < assignments.size(); ++a) {
    const LocalAssignment& la = assignments[a];
    la.distribution.validate();
    if (la.base_row < 0 || static_cast<std::size_t>(la.base_row) >= sys.base_rows.size()) {
      throw InputError("assignment references unknown base row " + std::to_string(la.base_row));
    }
    for (const auto& atom : la.distribution.atoms) {
      if (atom.point.size() != static_cast<std::size_t>(sys.base_vars)) {
        throw InputError("decomposition point dimension differs from the base");
      }
      for (const Constraint& row : sys.base_rows) {
        Rational lhs = 0;
        for (const Term& t : row.terms) lhs += t.coef * atom.point[static_cast<std::size_t>(t.var)];
        if (!holds(lhs, row.rel, row.rhs)) throw InputError("decomposition point violates base row '" + row.name + "'");
      }
    }
    for (const LiftedTerm& t : lift_constraint(sys.base_rows[static_cast<std::size_t>(la.base_row)], la.multiplier).terms) {
      shared[a].push_back(t.mono);
    }
  }
  std::vector<ConsistencyMismatch> out;
  for (std::size_t a = 0; a < assignments.size(); ++a) {
    for (std::size_t b = a + 1; b < assignments.size(); ++b) {
      std::vector<Monomial> common;
      std::set_intersection(shared[a].begin(), shared[a].end(), shared[b].begin(), shared[b].end(),
                            std::back_inserter(common));
      for (const Monomial& m : common) {
        Rational pa = event_probability(assignments[a].distribution, m);
        Rational pb = event_probability(assignments[b].distribution, m);
        if (pa != pb) out.push_back({a, b, m, pa, pb});
      }
    }
  }
  return out;
}

SymmetryResult is_assignment_symmetric(const Decomposition& d, const SymmetryRoles& roles, int max_event) {
  d.validate();
  if (!d.blame) throw InputError("assignment symmetry needs a blame facility");
  const int nf = roles.num_facilities;
  const int nc = roles.num_clients;
  const int dim = nf + nf * nc;
  if (d.atoms.front().point.size() != static_cast<std::size_t>(dim)) {
    throw InputError("decomposition points do not match the facility/client layout");
  }

  struct Generator {
    std::string name;
    std::vector<int> map;  // variable -> image
  };
  auto facility_swap = [&](int a, int b, const char* kind) {
    Generator g{std::string("swap ") + kind + " " + std::to_string(a) + "<->" + std::to_string(b), {}};
    std::vector<int> fac(static_cast<std::size_t>(nf));
    for (int i = 0; i < nf; ++i) fac[static_cast<std::size_t>(i)] = i;
    std::swap(fac[static_cast<std::size_t>(a)], fac[static_cast<std::size_t>(b)]);
    for (int i = 0; i < nf; ++i) g.map.push_back(fac[static_cast<std::size_t>(i)]);
    for (int i = 0; i < nf; ++i) {
      for (int j = 0; j < nc; ++j) g.map.push_back(nf + fac[static_cast<std::size_t>(i)] * nc + j);
    }
    return g;
  };
  std::vector<Generator> gens;
  for (std::size_t a = 0; a < roles.cheap.size(); ++a) {
    for (std::size_t b = a + 1; b < roles.cheap.size(); ++b) gens.push_back(facility_swap(roles.cheap[a], roles.cheap[b], "cheap"));
  }
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      Generator g{"swap client " + std::to_string(a) + "<->" + std::to_string(b), {}};
      for (int i = 0; i < nf; ++i) g.map.push_back(i);
      for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nc; ++j) g.map.push_back(nf + i * nc + (j == a ? b : j == b ? a : j));
      }
      gens.push_back(std::move(g));
    }
  }
  std::vector<int> costly;
  for (int i : roles.costly) {
    if (i != *d.blame) costly.push_back(i);
  }
  for (std::size_t a = 0; a < costly.size(); ++a) {
    for (std::size_t b = a + 1; b < costly.size(); ++b) gens.push_back(facility_swap(costly[a], costly[b], "costly"));
  }

  Monomial event;
  SymmetryResult result;
  std::function<bool(int)> rec = [&](int start) {
    if (!event.empty()) {
      Rational p = event_probability(d, event);
      for (const Generator& g : gens) {
        Monomial image;
        for (int v : event) image.push_back(g.map[static_cast<std::size_t>(v)]);
        std::sort(image.begin(), image.end());
        Rational q = event_probability(d, image);
        if (p != q) {
          result.symmetric = false;
          result.counterexample = g.name + " maps P[" + to_string(event) + "] = " + to_string(p) + " to P[" +
                                  to_string(image) + "] = " + to_string(q);
          return false;
        }
      }
    }
    if (static_cast<int>(event.size()) == max_event) return true;
    for (int v = start; v < dim; ++v) {
      event.push_back(v);
      bool ok = rec(v + 1);
      event.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  rec(0);
  return result;
}

}  // namespace capfl
