#pragma once

#include "capfl/instance.hpp"
#include "capfl/lp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace capfl {

/// LP-classic with its variable maps. y_i is variable i; x_ij is variable
/// |F| + i*|C| + j, so FractionalSolution::to_vector() is a point of the LP.
struct RelaxationBuild {
  LinearProgram lp;
  int num_facilities = 0;
  int num_clients = 0;

  int y(int i) const { return i; }
  int x(int i, int j) const { return num_facilities + i * num_clients + j; }
};

/// Rows in order: x_ij <= y_i, then sum_i x_ij = 1 per client, then the
/// capacity (CFL) or lower-bound (LBFL) row per facility. Demands weight
/// the linking rows; x_ij is the fraction of client j served by i.
RelaxationBuild build_classic(const Instance& inst);

struct IntegerOptimum {
  bool feasible = false;
  Rational value;
  std::vector<int> open;        // sorted facility ids
  std::vector<int> assignment;  // client -> facility

  FractionalSolution to_solution(const Instance& inst) const;
};

struct IpOptions {
  std::uint64_t subset_cap = std::uint64_t{1} << 20;
  /// Distribute subsets over OpenMP threads. The serial path is the reference.
  bool parallel = true;
  SolveOptions lp;
};

/// Exact integer optimum by facility-subset enumeration plus one
/// transportation LP per surviving subset. Unit demands only (InputError
/// otherwise); SizeLimitError when 2^|F| exceeds the cap.
IntegerOptimum solve_ip(const Instance& inst, const IpOptions& options = {});

/// Transportation LP for a fixed open set; nullopt when infeasible.
std::optional<IntegerOptimum> solve_fixed_open(const Instance& inst, const std::vector<int>& open,
                                               const SolveOptions& options = {});

struct Gap {
  bool infinite = false;
  Rational ratio;  // meaningful when !infinite

  std::string to_string() const;
};

/// ip / relaxation; 1 when both are 0; infinite when only the relaxation is 0.
/// InputError on a negative relaxation value.
Gap integrality_gap(const Rational& ip_value, const Rational& relaxation_value);

struct EnumerateOptions {
  std::size_t cap = 100'000;
  /// Admit open facilities that serve no client.
  bool zero_load = false;
};

/// Every feasible 0-1 (y,x) point in the LP-classic layout, ordered by open
/// set bitmask and then lexicographically by assignment. SizeLimitError when
/// more than `cap` points exist.
std::vector<std::vector<Rational>> enumerate_integer_points(const Instance& inst,
                                                            const EnumerateOptions& options = {});

}  // namespace capfl
