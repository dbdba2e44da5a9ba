#pragma once

#include "capfl/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace capfl {

enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Minimize, Maximize };

struct Term {
  int var;
  Rational coef;
};

struct Variable {
  std::string name;
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

/// sum(terms) <rel> rhs. Terms are sorted by variable and free of zeros.
struct Constraint {
  std::vector<Term> terms;
  Relation rel = Relation::LessEq;
  Rational rhs;
  std::string name;
};

/// An LP over rationals: variables with optional bounds, linear constraints
/// in insertion order, and a linear objective.
class LinearProgram {
 public:
  int add_variable(std::string name, std::optional<Rational> lower = Rational(0),
                   std::optional<Rational> upper = std::nullopt);

  /// Merges repeated variables, drops zero coefficients. Throws InputError on
  /// an undeclared variable.
  int add_constraint(std::vector<Term> terms, Relation rel, Rational rhs, std::string name = {});

  void set_objective(std::vector<Term> terms, Sense sense = Sense::Minimize);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  std::size_t num_nonzeros() const;

  const Variable& variable(int i) const { return variables_.at(static_cast<std::size_t>(i)); }
  Variable& variable(int i) { return variables_.at(static_cast<std::size_t>(i)); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Constraint& constraint(int i) const { return constraints_.at(static_cast<std::size_t>(i)); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  Rational evaluate_objective(std::span<const Rational> point) const;

 private:
  std::vector<Term> normalize(std::vector<Term> terms) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  Sense sense_ = Sense::Minimize;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  Rational value;               // meaningful when Optimal
  std::vector<Rational> point;  // indexed by variable id when Optimal
  /// Row multipliers of the final basis for the internal minimization
  /// (objective negated when maximizing). Filled by the primal method only.
  std::vector<Rational> duals;
  long iterations = 0;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

enum class PivotRule {
  /// Smallest eligible index throughout.
  Bland,
  /// Largest reduced cost, falling back to Bland during degenerate runs.
  Hybrid,
};

enum class SolveMethod {
  /// Dual when every variable is boxed in [0, u] and rows outnumber columns
  /// more than twice; primal otherwise.
  Auto,
  Primal,
  /// Simplex on the explicit dual, primal point recovered from its
  /// multipliers. Needs every variable boxed in [0, u].
  Dual,
};

struct SolveOptions {
  std::size_t max_nonzeros = 2'000'000;
  long max_iterations = 20'000'000;
  /// Basis reinversion period, in pivots.
  int refactor_every = 100;
  PivotRule pivot = PivotRule::Hybrid;
  /// Consecutive degenerate pivots before Hybrid switches to Bland.
  int degenerate_limit = 50;
  SolveMethod method = SolveMethod::Auto;
  /// degenerate_limit used when solving the explicit dual.
  int dual_degenerate_limit = 1;
};

/// Exact primal simplex with bounded variables. Throws
/// SizeLimitError when a cap in `options` is exceeded.
SolveOutcome solve(const LinearProgram& lp, const SolveOptions& options = {});

struct Violation {
  enum class Kind { Constraint, LowerBound, UpperBound } kind;
  int index;  // constraint id or variable id
  Rational lhs;
  Rational rhs;
  std::string describe(const LinearProgram& lp) const;
};

/// Exact evaluation of every constraint and bound. Empty result iff feasible.
/// Throws InputError when `point` does not cover every variable.
std::vector<Violation> check_point(const LinearProgram& lp, std::span<const Rational> point);

/// Human-readable dump, one constraint per line. Not a stable format.
std::string to_lp_text(const LinearProgram& lp);

std::string to_string(Relation rel);

struct ConvexWeights {
  bool in_hull = false;
  std::vector<Rational> weights;  // one per candidate when in_hull
};

/// Finds lambda >= 0, sum lambda = 1, sum lambda_k * candidate_k = target, or
/// reports that the target is outside the convex hull. Throws InputError on an
/// empty candidate list or mismatched dimensions.
ConvexWeights convex_decompose(std::span<const Rational> target,
                               const std::vector<std::vector<Rational>>& candidates,
                               const SolveOptions& options = {});

}  // namespace capfl
