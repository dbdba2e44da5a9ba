#pragma once

#include "capfl/instance.hpp"
#include "capfl/lp.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace capfl {

/// An opening and assignment pattern: the facilities F(cl) and the pairs
/// (i, j) of Agn_cl.
struct Class {
  std::vector<int> facilities;                  // sorted
  std::vector<std::pair<int, int>> assignments;  // (facility, client), sorted by client
  Rational cost;

  bool operator==(const Class& o) const { return facilities == o.facilities && assignments == o.assignments; }
  std::strong_ordering operator<=>(const Class& o) const {
    if (auto c = facilities <=> o.facilities; c != 0) return c;
    return assignments <=> o.assignments;
  }
};

/// Sorts the pattern and computes its cost. InputError when an assignment
/// uses a facility outside F(cl), a client appears twice, or an id is out
/// of range.
Class make_class(const Instance& inst, std::vector<int> facilities, std::vector<std::pair<int, int>> assignments);

/// Relabelings generating an orbit. Each block permutes its facilities and
/// carries the attached client pools with them (pool p belongs to facility
/// p). Every attached pool and every standalone client pool is permuted
/// independently. Ids outside all blocks and pools stay fixed.
struct OrbitGroup {
  struct Block {
    std::vector<int> facilities;
    std::vector<std::vector<int>> attached;  // empty, or one equal-size pool per facility
  };
  std::vector<Block> blocks;
  std::vector<std::vector<int>> client_pools;

  /// InputError on overlapping or out-of-range ids or ragged attached pools.
  void validate(int num_facilities, int num_clients) const;

  /// All facility relabelings and all client relabelings.
  static OrbitGroup full(int num_facilities, int num_clients);
};

/// The classes g(representative) for g in the group, each with equal weight.
struct Orbit {
  Class representative;
  OrbitGroup group;
};

struct ClassSet {
  std::vector<Class> classes;
  std::vector<Orbit> orbits;
  /// Set when the set is closed under all facility and client relabelings.
  bool symmetric = false;
};

/// Weights parallel to ClassSet::classes and ClassSet::orbits. An orbit
/// weight is the total over its classes, spread uniformly.
struct ConstellationSolution {
  std::vector<Rational> class_weights;
  std::vector<Rational> orbit_weights;
};

/// y_i = Σ_{cl∋i} x_cl, x_ij = Σ_{cl:(i,j)∈Agn} x_cl. Orbits are projected
/// in closed form by counting the relabelings that send each representative
/// pair onto (i, j). InputError when weight vectors do not match the set.
FractionalSolution project(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol);

/// Applies one relabeling: per-block facility permutations, then a
/// permutation per attached pool (indexed by source position) and per
/// standalone pool.
struct Relabeling {
  std::vector<std::vector<int>> block_perm;
  std::vector<std::vector<std::vector<int>>> attached_perm;
  std::vector<std::vector<int>> pool_perm;
};
Class apply(const Instance& inst, const OrbitGroup& group, const Relabeling& g, const Class& cl);
Relabeling random_relabeling(const OrbitGroup& group, std::mt19937_64& rng);

/// Every class of the orbit, sorted. SizeLimitError above `cap`.
std::vector<Class> materialize(const Instance& inst, const Orbit& orbit, std::size_t cap);

/// Lexicographically smallest class in the orbit of `cl` under `group`.
Class canonical_form(const Instance& inst, const Class& cl, const OrbitGroup& group, std::size_t cap = 1'000'000);

/// Explicit classes plus materialized orbits, deduplicated and sorted.
std::vector<Class> all_classes(const Instance& inst, const ClassSet& cs, std::size_t cap);

/// Variables per class; Σ_{cl assigning j} x_cl = 1 per client,
/// Σ_{cl∋i} x_cl <= 1 per facility; objective Σ c_cl x_cl. Orbits are
/// materialized; SizeLimitError above `cap` classes.
LinearProgram build_constellation_lp(const Instance& inst, const ClassSet& cs, std::size_t cap = 200'000);

/// The classes behind the variables of build_constellation_lp, in order.
std::vector<Class> constellation_lp_classes(const Instance& inst, const ClassSet& cs, std::size_t cap = 200'000);

/// Single facilities with 1..U clients (CFL) or at least B clients (LBFL).
/// Explicit up to `cap`; with `orbits` set, one orbit per (facility, size)
/// under all client relabelings instead.
ClassSet star_classes(const Instance& inst, std::size_t cap = 200'000, bool orbits = false);

/// Largest number of facilities open in some integer solution: |F| for CFL,
/// the most facilities whose bounds sum to at most the demand for LBFL.
int max_open_facilities(const Instance& inst);

/// max |F(cl)| / |F′| over classes and orbit representatives.
Rational complexity(const ClassSet& cs, const Instance& inst);

/// One class per integer solution (every client assigned).
ClassSet integral_class_set(const Instance& inst, std::size_t cap = 200'000);

/// Closure under all facility and client relabelings. Explicit mode
/// materializes up to `cap`; orbit mode stores each class as the
/// representative of a full-group orbit.
ClassSet symmetry_closure(const ClassSet& cs, const Instance& inst, std::size_t cap = 200'000, bool orbits = false);

/// Exact cost Σ c_cl x_cl, equal to the cost of the projection.
Rational solution_cost(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol);

/// Nonnegative class and orbit weights projecting exactly onto `target`.
struct ProjectionFit {
  bool feasible = false;
  ConstellationSolution solution;
};
ProjectionFit fit_projection(const Instance& inst, const ClassSet& cs, const FractionalSolution& target,
                             const SolveOptions& options = {});

/// Orbits for instances whose clients split into pools of interchangeable
/// clients. A class is described by how many clients of each pool each open
/// facility takes; the orbit permutes clients inside pools. `allowed` has
/// one flag per (facility, pool) and drops classes using any other pair,
/// which is exact when fitting a target whose support excludes them.
using PoolSupport = std::vector<std::vector<bool>>;

/// Facility-pool pairs with positive assignment in a pool-symmetric target.
PoolSupport pool_support(const FractionalSolution& target, const std::vector<std::vector<int>>& pools);

/// Stars (one facility) respecting the bound.
ClassSet pooled_star_classes(const Instance& inst, const std::vector<std::vector<int>>& pools,
                             const PoolSupport& allowed);

/// Integer solutions with at most |F|-1 facilities, plus integer solutions
/// with all |F| facilities restricted to any |F|-1 of them.
ClassSet pooled_enriched_classes(const Instance& inst, const std::vector<std::vector<int>>& pools,
                                 const PoolSupport& allowed);

/// The TOY_PROPER target: facilities 0 and 1 serve S1 and S2 integrally;
/// facility 2 (3) opens to 9/10 with 9/10 of S3 (S4) and 1/10 of S4 (S3).
FractionalSolution toy_target(const Instance& inst);

/// Explicit star classes with weights projecting onto toy_target.
std::pair<ClassSet, ConstellationSolution> toy_star_solution(const Instance& inst);

struct Rounds {
  Instance instance;
  ClassSet classes;  // orbits: round A then round B
  ConstellationSolution solution;
  FractionalSolution target;
  Rational phi, xi;
};

/// Round A and round B orbits for PROPER_LBFL(n) with parameter c. Throws
/// InputError unless n >= 4 and 2 <= c <= n-2; std::logic_error if the
/// projection misses the target.
Rounds build_rounds_lbfl(int n, int c, const Rational& d = 1, const std::optional<Rational>& d_far = std::nullopt);

/// Per-client fractions after one round: own facility, each other simplex
/// facility, and each far facility (round A only).
struct RoundFractions {
  Rational own, cross, far;
};
RoundFractions round_a_fractions(int n, int c, const Rational& phi);
RoundFractions round_b_fractions(int n, int c, const Rational& xi);

/// Explicit enumeration of all type-A and type-B classes with uniform
/// weights phi/|A| and xi/|B|. SizeLimitError above `cap` classes.
struct EnumeratedRounds {
  std::uint64_t type_a = 0;
  std::uint64_t type_b = 0;
  FractionalSolution projection;
};
EnumeratedRounds enumerate_rounds_lbfl(int n, int c, const Rational& phi, const Rational& xi,
                                       std::uint64_t cap = 5'000'000, bool parallel = true);

/// Round A over all n facilities and round B over the first n-1 for
/// PROPER_CFL(n), each from a class with t facilities of U clients.
Rounds build_rounds_cfl(int n, int t);

/// Monte-Carlo estimate of a projection: each sample picks an orbit with
/// probability proportional to its weight and a uniform relabeling. Reports
/// per facility the mean and standard error of y_i and of Σ_j x_ij.
struct SampleStats {
  std::vector<double> y_mean, y_sigma;
  std::vector<double> load_mean, load_sigma;
};
SampleStats sample_projection(const Instance& inst, const ClassSet& cs, const ConstellationSolution& sol, int samples,
                              std::uint64_t seed, bool parallel = true);

// Class files: "CLASS <id>", "OPEN <fac>", "ASSIGN <fac> <client>",
// optional "WEIGHT <p/q>"; orbits as
// "ORBIT <rep-id> FACPOOL <ids> [ATTACHED <ids>|<ids>...] ... CLIENTPOOLS <ids>;<ids>|- WEIGHT <p/q>".
struct ClassFile {
  ClassSet classes;
  ConstellationSolution solution;
};
ClassFile read_class_file(std::istream& in, const Instance& inst);
ClassFile read_class_file(const std::string& path, const Instance& inst);
void write_class_file(const ClassSet& cs, const ConstellationSolution& sol, std::ostream& out);

}  // namespace capfl
