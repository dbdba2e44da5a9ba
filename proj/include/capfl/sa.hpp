#pragma once

#include "capfl/lp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace capfl {

/// Sorted, duplicate-free set of base-variable ids. Empty means the constant 1.
using Monomial = std::vector<int>;

/// Union of two monomials, which is their product under x_i^2 = x_i.
Monomial multiply(const Monomial& a, const Monomial& b);
std::string to_string(const Monomial& m);

/// Multiplies a constraint by prod_{U-W} x_i * prod_{W} (1 - x_i).
struct Multiplier {
  std::vector<int> u;  // sorted
  std::vector<int> w;  // sorted, subset of u

  bool operator==(const Multiplier&) const = default;
  bool operator<(const Multiplier& o) const { return u != o.u ? u < o.u : w < o.w; }
};

struct LiftedTerm {
  Monomial mono;  // never empty; the constant part lives in rhs
  Rational coef;
};

/// sum(terms) <rel> rhs with rel LessEq or Equal. Terms are sorted by monomial.
struct LiftedConstraint {
  std::vector<LiftedTerm> terms;
  Relation rel = Relation::LessEq;
  Rational rhs;
};

/// Expands constraint * multiplier symbolically. GreaterEq rows are first
/// negated into LessEq form; equalities stay equalities.
LiftedConstraint lift_constraint(const Constraint& c, const Multiplier& m);

/// All (U, W) with |U| <= k over variables 0..d-1, W subset of U. Ordered by
/// |U|, then U, then W.
std::vector<Multiplier> all_multipliers(int d, int k);

struct SaOptions {
  std::size_t max_nonzeros = 2'000'000;
  bool parallel = true;
  SolveOptions lp;
};

/// The level-k system. Base rows are the base LP's constraints followed by
/// its variable bounds as rows (lower bound, then upper bound per variable).
struct LiftedSystem {
  int level = 0;
  int base_vars = 0;
  std::vector<Constraint> base_rows;
  /// Extension variables 0..n-1, ordered by degree then lexicographically.
  std::vector<Monomial> monomials;
  std::map<Monomial, int> index;
  std::vector<LiftedConstraint> constraints;
  struct Provenance {
    int base_row;
    Multiplier multiplier;
  };
  std::vector<Provenance> provenance;  // parallel to constraints

  int var(const Monomial& m) const;
  /// Extension variable of the singleton {v}.
  int singleton(int v) const { return var(Monomial{v}); }

  /// One LP variable per monomial, bounded in [0,1] (implied by the lifted
  /// bound rows). Identical rows are merged. The objective is `objective`
  /// over base variables, mapped to singletons.
  LinearProgram to_lp(const std::vector<Term>& objective = {}, Sense sense = Sense::Minimize) const;

  /// Debug dump: monomial names followed by the LP text.
  std::string dump() const;
};

/// Requires every base variable to carry bounds 0 <= x <= 1. SizeLimitError
/// when the lifted system would exceed options.max_nonzeros.
LiftedSystem build_sa(const LinearProgram& base, int k, const SaOptions& options = {});

/// Optimum of the base objective over SA^k(P).
SolveOutcome sa_optimize(const LinearProgram& base, int k, const SaOptions& options = {});

struct Membership {
  bool member = false;
  /// Value per extension variable of the lifted system when member.
  std::vector<Rational> witness;
};

/// Fixes singletons to `point`, solves for the remaining extension variables.
/// InputError when the point dimension differs from the base.
Membership sa_membership(const LinearProgram& base, int k, const std::vector<Rational>& point,
                         const SaOptions& options = {});
Membership sa_membership(const LiftedSystem& sys, const std::vector<Rational>& point,
                         const SolveOptions& options = {});

/// A finite distribution over 0-1 points.
struct Decomposition {
  struct Atom {
    Rational weight;
    std::vector<std::uint8_t> point;
  };
  std::vector<Atom> atoms;
  std::optional<int> blame;  // facility id

  /// InputError unless weights are positive and sum to 1 and all points
  /// share one dimension.
  void validate() const;
};

/// Total weight of the points where every variable of `event` is 1.
Rational event_probability(const Decomposition& d, const Monomial& event);

struct LocalAssignment {
  int base_row;
  Multiplier multiplier;
  Decomposition distribution;
};

struct ConsistencyMismatch {
  std::size_t first, second;  // indices into the assignment list
  Monomial monomial;
  Rational p_first, p_second;
};

/// Cross-checks event probabilities on monomials shared by the lifted forms
/// of every pair of assignments. Points must be feasible for the base rows.
std::vector<ConsistencyMismatch> check_local_consistency(const LiftedSystem& sys,
                                                         const std::vector<LocalAssignment>& assignments);

/// Facility roles for the symmetry check; points use the LP-classic layout.
struct SymmetryRoles {
  int num_facilities = 0;
  int num_clients = 0;
  std::vector<int> cheap;
  std::vector<int> costly;
};

struct SymmetryResult {
  bool symmetric = true;
  std::string counterexample;
};

/// Checks invariance of every event of at most `max_event` variables under
/// cheap/cheap, client/client and costly/costly swaps (blame excluded).
SymmetryResult is_assignment_symmetric(const Decomposition& d, const SymmetryRoles& roles, int max_event);

}  // namespace capfl
