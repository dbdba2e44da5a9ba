#include "capfl/lp.hpp"

#include "capfl/error.hpp"

#include <algorithm>
#include <sstream>

namespace capfl {

int LinearProgram::add_variable(std::string name, std::optional<Rational> lower,
                                std::optional<Rational> upper) {
  if (lower && upper && *lower > *upper) {
    throw InputError("variable '" + name + "' has lower bound above upper bound");
  }
  variables_.push_back(Variable{std::move(name), std::move(lower), std::move(upper)});
  return num_variables() - 1;
}

std::vector<Term> LinearProgram::normalize(std::vector<Term> terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw InputError("constraint references undeclared variable " + std::to_string(t.var));
    }
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return sgn(t.coef) == 0; });
  return merged;
}

int LinearProgram::add_constraint(std::vector<Term> terms, Relation rel, Rational rhs, std::string name) {
  constraints_.push_back(Constraint{normalize(std::move(terms)), rel, std::move(rhs), std::move(name)});
  return num_constraints() - 1;
}

void LinearProgram::set_objective(std::vector<Term> terms, Sense sense) {
  objective_ = normalize(std::move(terms));
  sense_ = sense;
}

std::size_t LinearProgram::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const Constraint& c : constraints_) nnz += c.terms.size();
  return nnz;
}

Rational LinearProgram::evaluate_objective(std::span<const Rational> point) const {
  Rational value = 0;
  for (const Term& t : objective_) value += t.coef * point[static_cast<std::size_t>(t.var)];
  return value;
}

std::string to_string(Relation rel) {
  switch (rel) {
    case Relation::LessEq: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEq: return ">=";
  }
  return "?";
}

std::string Violation::describe(const LinearProgram& lp) const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Constraint: {
      const Constraint& c = lp.constraint(index);
      out << "constraint " << index;
      if (!c.name.empty()) out << " (" << c.name << ")";
      out << ": lhs " << to_string(lhs) << " " << to_string(c.rel) << " " << to_string(rhs) << " fails";
      break;
    }
    case Kind::LowerBound:
      out << "bound " << lp.variable(index).name << " >= " << to_string(rhs) << " fails (value "
          << to_string(lhs) << ")";
      break;
    case Kind::UpperBound:
      out << "bound " << lp.variable(index).name << " <= " << to_string(rhs) << " fails (value "
          << to_string(lhs) << ")";
      break;
  }
  return out.str();
}

std::vector<Violation> check_point(const LinearProgram& lp, std::span<const Rational> point) {
  if (point.size() != static_cast<std::size_t>(lp.num_variables())) {
    throw InputError("point has " + std::to_string(point.size()) + " entries, LP has " +
                     std::to_string(lp.num_variables()) + " variables");
  }
  std::vector<Violation> out;
  for (int v = 0; v < lp.num_variables(); ++v) {
    const Variable& var = lp.variable(v);
    const Rational& value = point[static_cast<std::size_t>(v)];
    if (var.lower && value < *var.lower) out.push_back({Violation::Kind::LowerBound, v, value, *var.lower});
    if (var.upper && value > *var.upper) out.push_back({Violation::Kind::UpperBound, v, value, *var.upper});
  }
  Rational lhs;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    lhs = 0;
    for (const Term& t : c.terms) lhs += t.coef * point[static_cast<std::size_t>(t.var)];
    bool ok = true;
    switch (c.rel) {
      case Relation::LessEq: ok = lhs <= c.rhs; break;
      case Relation::Equal: ok = lhs == c.rhs; break;
      case Relation::GreaterEq: ok = lhs >= c.rhs; break;
    }
    if (!ok) out.push_back({Violation::Kind::Constraint, i, lhs, c.rhs});
  }
  return out;
}

std::string to_lp_text(const LinearProgram& lp) {
  std::ostringstream out;
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) out << "0";
    bool first = true;
    for (const Term& t : terms) {
      if (!first) out << (sgn(t.coef) < 0 ? " - " : " + ");
      else if (sgn(t.coef) < 0) out << "-";
      Rational mag = abs(t.coef);
      if (mag != 1) out << to_string(mag) << " ";
      out << lp.variable(t.var).name;
      first = false;
    }
  };
  out << (lp.sense() == Sense::Minimize ? "min " : "max ");
  write_terms(lp.objective());
  out << "\n";
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    out << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ": ";
    write_terms(c.terms);
    out << " " << to_string(c.rel) << " " << to_string(c.rhs) << "\n";
  }
  for (const Variable& v : lp.variables()) {
    out << "bound " << (v.lower ? to_string(*v.lower) : "-inf") << " <= " << v.name << " <= "
        << (v.upper ? to_string(*v.upper) : "+inf") << "\n";
  }
  return out.str();
}

ConvexWeights convex_decompose(std::span<const Rational> target,
                               const std::vector<std::vector<Rational>>& candidates,
                               const SolveOptions& options) {
  if (candidates.empty()) throw InputError("convex_decompose: empty candidate list");
  for (const auto& c : candidates) {
    if (c.size() != target.size()) throw InputError("convex_decompose: candidate dimension mismatch");
  }
  LinearProgram lp;
  for (std::size_t k = 0; k < candidates.size(); ++k) lp.add_variable("l" + std::to_string(k));
  std::vector<Term> sum;
  for (int k = 0; k < lp.num_variables(); ++k) sum.push_back({k, 1});
  lp.add_constraint(std::move(sum), Relation::Equal, 1, "weights");
  for (std::size_t v = 0; v < target.size(); ++v) {
    std::vector<Term> row;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (sgn(candidates[k][v]) != 0) row.push_back({static_cast<int>(k), candidates[k][v]});
    }
    if (row.empty()) {
      if (sgn(target[v]) != 0) return {};
      continue;
    }
    lp.add_constraint(std::move(row), Relation::Equal, target[v], "coord" + std::to_string(v));
  }
  SolveOutcome outcome = solve(lp, options);
  if (!outcome.optimal()) return {};
  return {true, std::move(outcome.point)};
}

}  // namespace capfl
