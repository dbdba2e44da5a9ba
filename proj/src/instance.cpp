#include "capfl/instance.hpp"

#include "capfl/error.hpp"

#include <algorithm>

namespace capfl {

Instance::Instance(ProblemKind kind, std::vector<Facility> facilities, std::vector<Client> clients,
                   const Rational& default_distance)
    : kind_(kind),
      facilities_(std::move(facilities)),
      clients_(std::move(clients)),
      dist_(facilities_.size() * clients_.size(), default_distance) {}

std::int64_t Instance::total_demand() const {
  std::int64_t total = 0;
  for (const Client& c : clients_) total += c.demand;
  return total;
}

std::optional<std::int64_t> Instance::uniform_bound() const {
  if (facilities_.empty()) return std::nullopt;
  std::int64_t b = facilities_.front().bound;
  for (const Facility& f : facilities_) {
    if (f.bound != b) return std::nullopt;
  }
  return b;
}

void Instance::validate() const {
  if (facilities_.empty()) throw InputError("instance has no facilities");
  if (clients_.empty()) throw InputError("instance has no clients");
  for (int i = 0; i < num_facilities(); ++i) {
    if (sgn(facility(i).open_cost) < 0) {
      throw InputError("facility " + std::to_string(i) + ": open_cost must be >= 0");
    }
    if (facility(i).bound <= 0) {
      throw InputError("facility " + std::to_string(i) + ": bound must be a positive integer");
    }
  }
  for (int j = 0; j < num_clients(); ++j) {
    if (client(j).demand <= 0) {
      throw InputError("client " + std::to_string(j) + ": demand must be a positive integer");
    }
  }
  for (int i = 0; i < num_facilities(); ++i) {
    for (int j = 0; j < num_clients(); ++j) {
      if (sgn(distance(i, j)) < 0) {
        throw InputError("distance " + std::to_string(i) + " " + std::to_string(j) + " must be >= 0");
      }
    }
  }
  const std::int64_t demand = total_demand();
  if (kind_ == ProblemKind::CFL) {
    std::int64_t capacity = 0;
    for (const Facility& f : facilities_) capacity += f.bound;
    if (capacity < demand) throw InputError("total capacity is below total demand");
  } else {
    std::int64_t smallest = facilities_.front().bound;
    for (const Facility& f : facilities_) smallest = std::min(smallest, f.bound);
    if (smallest > demand) throw InputError("every lower bound exceeds total demand");
  }
}

FractionalSolution FractionalSolution::zeros(int facilities, int clients) {
  FractionalSolution s;
  s.y.assign(static_cast<std::size_t>(facilities), Rational(0));
  s.x.assign(static_cast<std::size_t>(facilities), std::vector<Rational>(static_cast<std::size_t>(clients)));
  return s;
}

std::vector<Rational> FractionalSolution::to_vector() const {
  std::vector<Rational> v(y);
  for (const auto& row : x) v.insert(v.end(), row.begin(), row.end());
  return v;
}

FractionalSolution FractionalSolution::from_vector(const std::vector<Rational>& v, int facilities,
                                                   int clients) {
  const auto nf = static_cast<std::size_t>(facilities);
  const auto nc = static_cast<std::size_t>(clients);
  if (v.size() < nf + nf * nc) throw InputError("solution vector too short");
  FractionalSolution s = zeros(facilities, clients);
  for (std::size_t i = 0; i < nf; ++i) {
    s.y[i] = v[i];
    for (std::size_t j = 0; j < nc; ++j) s.x[i][j] = v[nf + i * nc + j];
  }
  return s;
}

Rational FractionalSolution::cost(const Instance& inst) const {
  Rational total = 0;
  for (int i = 0; i < inst.num_facilities(); ++i) {
    const auto fi = static_cast<std::size_t>(i);
    total += inst.facility(i).open_cost * y[fi];
    for (int j = 0; j < inst.num_clients(); ++j) {
      const Rational& xij = x[fi][static_cast<std::size_t>(j)];
      if (sgn(xij) != 0) total += inst.distance(i, j) * xij;
    }
  }
  return total;
}

std::vector<MetricViolation> validate_metric(const Instance& inst) {
  std::vector<MetricViolation> out;
  const int nf = inst.num_facilities();
  const int nc = inst.num_clients();
  Rational rhs;
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nc; ++j) {
      const Rational& lhs = inst.distance(i, j);
      if (sgn(lhs) == 0) continue;
      for (int i2 = 0; i2 < nf; ++i2) {
        for (int j2 = 0; j2 < nc; ++j2) {
          rhs = inst.distance(i, j2);
          rhs += inst.distance(i2, j2);
          rhs += inst.distance(i2, j);
          if (lhs > rhs) out.push_back({i, i2, j, j2});
        }
      }
    }
  }
  return out;
}

std::string to_string(ProblemKind kind) { return kind == ProblemKind::CFL ? "cfl" : "lbfl"; }

}  // namespace capfl
