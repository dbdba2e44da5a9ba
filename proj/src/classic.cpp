#include "capfl/classic.hpp"

#include "capfl/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace capfl {

RelaxationBuild build_classic(const Instance& inst) {
  RelaxationBuild b;
  b.num_facilities = inst.num_facilities();
  b.num_clients = inst.num_clients();
  const int nf = b.num_facilities;
  const int nc = b.num_clients;
  LinearProgram& lp = b.lp;
  for (int i = 0; i < nf; ++i) lp.add_variable("y" + std::to_string(i), Rational(0), Rational(1));
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nc; ++j) {
      lp.add_variable("x" + std::to_string(i) + "_" + std::to_string(j), Rational(0), Rational(1));
    }
  }
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nc; ++j) {
      lp.add_constraint({{b.x(i, j), 1}, {b.y(i), -1}}, Relation::LessEq, 0,
                        "link" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  for (int j = 0; j < nc; ++j) {
    std::vector<Term> row;
    for (int i = 0; i < nf; ++i) row.push_back({b.x(i, j), 1});
    lp.add_constraint(std::move(row), Relation::Equal, 1, "assign" + std::to_string(j));
  }
  const bool cfl = inst.kind() == ProblemKind::CFL;
  for (int i = 0; i < nf; ++i) {
    std::vector<Term> row;
    for (int j = 0; j < nc; ++j) row.push_back({b.x(i, j), Rational(inst.client(j).demand)});
    row.push_back({b.y(i), Rational(-inst.facility(i).bound)});
    lp.add_constraint(std::move(row), cfl ? Relation::LessEq : Relation::GreaterEq, 0,
                      (cfl ? "cap" : "lower") + std::to_string(i));
  }
  std::vector<Term> obj;
  for (int i = 0; i < nf; ++i) obj.push_back({b.y(i), inst.facility(i).open_cost});
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nc; ++j) obj.push_back({b.x(i, j), inst.distance(i, j)});
  }
  lp.set_objective(std::move(obj));
  return b;
}

FractionalSolution IntegerOptimum::to_solution(const Instance& inst) const {
  FractionalSolution s = FractionalSolution::zeros(inst.num_facilities(), inst.num_clients());
  for (int i : open) s.y[static_cast<std::size_t>(i)] = 1;
  for (std::size_t j = 0; j < assignment.size(); ++j) s.x[static_cast<std::size_t>(assignment[j])][j] = 1;
  return s;
}

std::optional<IntegerOptimum> solve_fixed_open(const Instance& inst, const std::vector<int>& open,
                                               const SolveOptions& options) {
  const int nc = inst.num_clients();
  const int k = static_cast<int>(open.size());
  if (k == 0) return std::nullopt;
  for (const Client& c : inst.clients()) {
    if (c.demand != 1) throw InputError("solve_fixed_open supports unit demands only");
  }
  // Clients with the same distances to the open set are interchangeable, so
  // the LP ships group sizes; the constraint matrix stays totally unimodular.
  std::map<std::vector<Rational>, std::vector<int>> by_row;
  for (int j = 0; j < nc; ++j) {
    std::vector<Rational> row;
    for (int i : open) row.push_back(inst.distance(i, j));
    by_row[std::move(row)].push_back(j);
  }
  std::vector<const std::vector<Rational>*> rows;
  std::vector<const std::vector<int>*> groups;
  for (const auto& [row, members] : by_row) {
    rows.push_back(&row);
    groups.push_back(&members);
  }
  const int ng = static_cast<int>(groups.size());
  LinearProgram lp;
  auto var = [ng](int a, int g) { return a * ng + g; };
  for (int a = 0; a < k; ++a) {
    for (int g = 0; g < ng; ++g) {
      lp.add_variable("x" + std::to_string(open[static_cast<std::size_t>(a)]) + "_g" + std::to_string(g));
    }
  }
  for (int g = 0; g < ng; ++g) {
    std::vector<Term> row;
    for (int a = 0; a < k; ++a) row.push_back({var(a, g), 1});
    lp.add_constraint(std::move(row), Relation::Equal, Rational(static_cast<long>(groups[static_cast<std::size_t>(g)]->size())));
  }
  const bool cfl = inst.kind() == ProblemKind::CFL;
  for (int a = 0; a < k; ++a) {
    std::vector<Term> row;
    for (int g = 0; g < ng; ++g) row.push_back({var(a, g), 1});
    lp.add_constraint(std::move(row), cfl ? Relation::LessEq : Relation::GreaterEq,
                      Rational(inst.facility(open[static_cast<std::size_t>(a)]).bound));
  }
  std::vector<Term> obj;
  for (int a = 0; a < k; ++a) {
    for (int g = 0; g < ng; ++g) obj.push_back({var(a, g), (*rows[static_cast<std::size_t>(g)])[static_cast<std::size_t>(a)]});
  }
  lp.set_objective(std::move(obj));
  SolveOutcome out = solve(lp, options);
  if (!out.optimal()) return std::nullopt;

  IntegerOptimum r;
  r.feasible = true;
  r.open = open;
  r.assignment.assign(static_cast<std::size_t>(nc), -1);
  r.value = out.value;
  for (int i : open) r.value += inst.facility(i).open_cost;
  // Clients of a group go out in id order, facility by facility.
  for (int g = 0; g < ng; ++g) {
    std::size_t next = 0;
    const std::vector<int>& members = *groups[static_cast<std::size_t>(g)];
    for (int a = 0; a < k; ++a) {
      const Rational& v = out.point[static_cast<std::size_t>(var(a, g))];
      if (v.get_den() != 1) throw std::logic_error("transportation vertex is not integral");
      for (long t = 0; t < v.get_num().get_si(); ++t) r.assignment[static_cast<std::size_t>(members[next++])] = open[static_cast<std::size_t>(a)];
    }
  }
  return r;
}

namespace {

struct Candidate {
  Rational open_cost;
  std::uint64_t mask;
};

/// Opening cost plus each client's distance to its nearest open facility.
Rational lower_bound(const Instance& inst, const Candidate& c) {
  const int nf = inst.num_facilities();
  Rational bound = c.open_cost;
  for (int j = 0; j < inst.num_clients(); ++j) {
    const Rational* nearest = nullptr;
    for (int i = 0; i < nf; ++i) {
      if (((c.mask >> i) & 1u) && (!nearest || inst.distance(i, j) < *nearest)) nearest = &inst.distance(i, j);
    }
    bound += *nearest;
  }
  return bound;
}

std::vector<int> members(std::uint64_t mask, int nf) {
  std::vector<int> out;
  for (int i = 0; i < nf; ++i) {
    if ((mask >> i) & 1u) out.push_back(i);
  }
  return out;
}

std::vector<Candidate> candidate_subsets(const Instance& inst, const IpOptions& options) {
  const int nf = inst.num_facilities();
  for (const Client& c : inst.clients()) {
    if (c.demand != 1) throw InputError("solve_ip supports unit demands only");
  }
  if (nf >= 63 || (std::uint64_t{1} << nf) > options.subset_cap) {
    throw SizeLimitError("solve_ip: 2^" + std::to_string(nf) + " subsets exceed the cap of " +
                         std::to_string(options.subset_cap));
  }
  const std::int64_t demand = inst.total_demand();
  const bool cfl = inst.kind() == ProblemKind::CFL;
  std::vector<Candidate> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nf); ++mask) {
    std::int64_t bound_sum = 0;
    Rational cost = 0;
    for (int i = 0; i < nf; ++i) {
      if ((mask >> i) & 1u) {
        bound_sum += inst.facility(i).bound;
        cost += inst.facility(i).open_cost;
      }
    }
    if (cfl ? bound_sum < demand : bound_sum > demand) continue;
    out.push_back({std::move(cost), mask});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.open_cost < b.open_cost; });
  return out;
}

}  // namespace

IntegerOptimum solve_ip(const Instance& inst, const IpOptions& options) {
  const std::vector<Candidate> cands = candidate_subsets(inst, options);
  const int nf = inst.num_facilities();
  std::optional<IntegerOptimum> best;
  long best_index = -1;

  if (!options.parallel) {
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (best && cands[c].open_cost > best->value) break;
      if (best && lower_bound(inst, cands[c]) > best->value) continue;
      auto r = solve_fixed_open(inst, members(cands[c].mask, nf), options.lp);
      if (r && (!best || r->value < best->value)) best = std::move(r);
    }
    return best ? *best : IntegerOptimum{};
  }

  // Pruning uses the incumbent only when a subset's lower bound is strictly
  // larger, so every optimal subset is still evaluated and the lowest index
  // among them wins, as in the serial loop.
  const long count = static_cast<long>(cands.size());
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < count; ++c) {
    const Candidate& cand = cands[static_cast<std::size_t>(c)];
    bool skip = false;
    std::optional<Rational> incumbent;
#pragma omp critical(capfl_ip)
    {
      skip = failed || (best && cand.open_cost > best->value);
      if (best) incumbent = best->value;
    }
    if (skip || (incumbent && lower_bound(inst, cand) > *incumbent)) continue;
    std::optional<IntegerOptimum> r;
    try {
      r = solve_fixed_open(inst, members(cands[static_cast<std::size_t>(c)].mask, nf), options.lp);
    } catch (const std::exception& e) {
#pragma omp critical(capfl_ip)
      {
        failed = true;
        failure = e.what();
      }
      continue;
    }
    if (!r) continue;
#pragma omp critical(capfl_ip)
    {
      if (!best || r->value < best->value || (r->value == best->value && c < best_index)) {
        best = std::move(r);
        best_index = c;
      }
    }
  }
  if (failed) throw SizeLimitError("solve_ip: " + failure);
  return best ? *best : IntegerOptimum{};
}

std::string Gap::to_string() const { return infinite ? "inf" : capfl::to_string(ratio); }

Gap integrality_gap(const Rational& ip_value, const Rational& relaxation_value) {
  if (sgn(relaxation_value) < 0) throw InputError("relaxation value must be nonnegative");
  if (sgn(relaxation_value) == 0) {
    if (sgn(ip_value) == 0) return {false, Rational(1)};
    return {true, Rational(0)};
  }
  return {false, ip_value / relaxation_value};
}

std::vector<std::vector<Rational>> enumerate_integer_points(const Instance& inst,
                                                            const EnumerateOptions& options) {
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  if (nf > 30) throw SizeLimitError("enumerate_integer_points: too many facilities");
  const bool cfl = inst.kind() == ProblemKind::CFL;
  std::vector<std::vector<Rational>> out;
  std::vector<std::int64_t> suffix(static_cast<std::size_t>(nc) + 1, 0);
  for (int j = nc - 1; j >= 0; --j) suffix[static_cast<std::size_t>(j)] = suffix[static_cast<std::size_t>(j) + 1] + inst.client(j).demand;

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nf); ++mask) {
    std::vector<int> open = members(mask, nf);
    std::vector<std::int64_t> need(open.size());
    for (std::size_t a = 0; a < open.size(); ++a) {
      std::int64_t b = inst.facility(open[a]).bound;
      need[a] = cfl ? (options.zero_load ? 0 : 1) : b;
    }
    std::vector<std::int64_t> load(open.size(), 0);
    std::vector<int> pick(static_cast<std::size_t>(nc), -1);

    std::function<void(int)> rec = [&](int j) {
      std::int64_t deficit = 0;
      std::int64_t room = 0;
      for (std::size_t a = 0; a < open.size(); ++a) {
        deficit += std::max<std::int64_t>(0, need[a] - load[a]);
        room += inst.facility(open[a]).bound - load[a];
      }
      if (deficit > suffix[static_cast<std::size_t>(j)]) return;
      if (cfl && room < suffix[static_cast<std::size_t>(j)]) return;
      if (j == nc) {
        if (out.size() >= options.cap) {
          throw SizeLimitError("enumerate_integer_points: more than " + std::to_string(options.cap) + " points");
        }
        std::vector<Rational> point(static_cast<std::size_t>(nf + nf * nc), Rational(0));
        for (int i : open) point[static_cast<std::size_t>(i)] = 1;
        for (int jj = 0; jj < nc; ++jj) {
          point[static_cast<std::size_t>(nf + open[static_cast<std::size_t>(pick[static_cast<std::size_t>(jj)])] * nc + jj)] = 1;
        }
        out.push_back(std::move(point));
        return;
      }
      const std::int64_t d = inst.client(j).demand;
      for (std::size_t a = 0; a < open.size(); ++a) {
        if (cfl && load[a] + d > inst.facility(open[a]).bound) continue;
        load[a] += d;
        pick[static_cast<std::size_t>(j)] = static_cast<int>(a);
        rec(j + 1);
        load[a] -= d;
      }
    };
    rec(0);
  }
  return out;
}

}  // namespace capfl
