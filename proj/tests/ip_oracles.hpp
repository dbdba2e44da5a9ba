#pragma once

// Test-only instance generator and integer optimum by exhaustive assignment.

#include "capfl/instance.hpp"

#include <optional>
#include <random>
#include <vector>

namespace oracle {

/// Unit demands, integer open costs 0..6, distances in halves 0..3, bounds
/// 1..3. CFL capacities are raised to cover the clients; LBFL keeps one
/// facility with bound 1 so a solution exists.
inline capfl::Instance random_tiny(std::mt19937_64& rng, capfl::ProblemKind kind, int nf, int nc) {
  using namespace capfl;
  std::uniform_int_distribution<int> cost(0, 6);
  std::uniform_int_distribution<int> bound(1, 3);
  std::vector<Facility> f;
  for (int i = 0; i < nf; ++i) f.push_back({Rational(cost(rng)), bound(rng)});
  if (kind == ProblemKind::CFL) {
    std::int64_t total = 0;
    for (auto& x : f) total += x.bound;
    if (total < nc) f.back().bound += nc - total;
  } else {
    f.front().bound = 1;
  }
  Instance inst(kind, f, std::vector<Client>(static_cast<std::size_t>(nc), Client{1}));
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nc; ++j) inst.set_distance(i, j, make_rational(cost(rng), 2));
  }
  return inst;
}

/// Minimum over every client-to-facility map, opening exactly the used
/// facilities. Unit demands only.
inline std::optional<capfl::Rational> brute_force_ip(const capfl::Instance& inst) {
  using namespace capfl;
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  std::vector<int> a(static_cast<std::size_t>(nc), 0);
  std::optional<Rational> best;
  while (true) {
    std::vector<std::int64_t> load(static_cast<std::size_t>(nf), 0);
    Rational cost = 0;
    for (int j = 0; j < nc; ++j) {
      ++load[static_cast<std::size_t>(a[static_cast<std::size_t>(j)])];
      cost += inst.distance(a[static_cast<std::size_t>(j)], j);
    }
    bool ok = true;
    for (int i = 0; i < nf; ++i) {
      std::int64_t l = load[static_cast<std::size_t>(i)];
      if (l == 0) continue;
      cost += inst.facility(i).open_cost;
      if (inst.kind() == ProblemKind::CFL ? l > inst.facility(i).bound : l < inst.facility(i).bound) ok = false;
    }
    if (ok && (!best || cost < *best)) best = cost;
    int j = 0;
    while (j < nc && ++a[static_cast<std::size_t>(j)] == nf) a[static_cast<std::size_t>(j++)] = 0;
    if (j == nc) break;
  }
  return best;
}

}  // namespace oracle
