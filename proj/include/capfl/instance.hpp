#pragma once

#include "capfl/rational.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capfl {

enum class ProblemKind { CFL, LBFL };

struct Facility {
  Rational open_cost;
  /// Capacity u_i for CFL, lower bound b_i for LBFL.
  std::int64_t bound = 1;

  bool operator==(const Facility&) const = default;
};

struct Client {
  std::int64_t demand = 1;

  bool operator==(const Client&) const = default;
};

/// A CFL or LBFL instance. Facilities and clients are identified by their
/// position; distances are stored row-major by facility.
class Instance {
 public:
  Instance() = default;
  Instance(ProblemKind kind, std::vector<Facility> facilities, std::vector<Client> clients,
           const Rational& default_distance = Rational(0));

  ProblemKind kind() const { return kind_; }
  int num_facilities() const { return static_cast<int>(facilities_.size()); }
  int num_clients() const { return static_cast<int>(clients_.size()); }
  const Facility& facility(int i) const { return facilities_.at(static_cast<std::size_t>(i)); }
  const Client& client(int j) const { return clients_.at(static_cast<std::size_t>(j)); }
  const std::vector<Facility>& facilities() const { return facilities_; }
  const std::vector<Client>& clients() const { return clients_; }

  const Rational& distance(int i, int j) const { return dist_[index(i, j)]; }
  void set_distance(int i, int j, const Rational& value) { dist_[index(i, j)] = value; }

  std::int64_t total_demand() const;
  /// The common bound when every facility has the same one.
  std::optional<std::int64_t> uniform_bound() const;

  /// Throws InputError naming the first violated invariant.
  void validate() const;

  bool operator==(const Instance&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * clients_.size() + static_cast<std::size_t>(j);
  }

  ProblemKind kind_ = ProblemKind::CFL;
  std::vector<Facility> facilities_;
  std::vector<Client> clients_;
  std::vector<Rational> dist_;
};

/// Opening values y_i and assignment values x_ij.
struct FractionalSolution {
  std::vector<Rational> y;
  std::vector<std::vector<Rational>> x;

  static FractionalSolution zeros(int facilities, int clients);

  /// Flattened in the LP-classic layout: y_0..y_{F-1}, then x row-major.
  std::vector<Rational> to_vector() const;
  static FractionalSolution from_vector(const std::vector<Rational>& v, int facilities, int clients);

  /// Σ f_i y_i + Σ c_ij x_ij.
  Rational cost(const Instance& inst) const;

  bool operator==(const FractionalSolution&) const = default;
};

struct MetricViolation {
  int i, i2, j, j2;  // c[i][j] > c[i][j2] + c[i2][j2] + c[i2][j]
};

/// Every quadruple violating the facility-location triangle inequality.
std::vector<MetricViolation> validate_metric(const Instance& inst);

std::string to_string(ProblemKind kind);

// Text formats. Readers throw ParseError (with line) or InputError.
Instance read_instance(std::istream& in);
Instance read_instance_file(const std::string& path);
void write_instance(const Instance& inst, std::ostream& out);
void write_instance_file(const Instance& inst, const std::string& path);

FractionalSolution read_solution(std::istream& in, const Instance& inst);
FractionalSolution read_solution_file(const std::string& path, const Instance& inst);
void write_solution(const FractionalSolution& sol, std::ostream& out);

}  // namespace capfl
