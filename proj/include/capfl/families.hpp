#pragma once

#include "capfl/instance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace capfl {

enum class Family { SaCfl, EffcapCfl, SaLbflSimplex, ProperLbfl, ProperCfl, ToyProper };

struct FamilyId {
  Family family = Family::SaCfl;
  int n = 4;
  /// Simplex edge length for ProperLbfl.
  Rational d = 1;
  /// Far-point distance for ProperLbfl; n*d when unset.
  std::optional<Rational> d_far;

  Rational far_distance() const { return d_far ? *d_far : Rational(n) * d; }
};

/// Command-line names: sa-cfl, effcap-cfl, sa-lbfl-simplex, proper-lbfl,
/// proper-cfl, toy-proper.
std::string to_string(Family f);
Family parse_family(const std::string& name);

/// Smallest admissible n; TOY_PROPER ignores n.
int min_n(Family f);

/// Throws InputError when the parameters violate the family's requirements.
void check_family(const FamilyId& id);

Instance gen_instance(const FamilyId& id);

/// Defined for SaCfl, EffcapCfl and SaLbflSimplex; InputError otherwise.
FractionalSolution gen_bad_solution(const FamilyId& id);

/// Facility roles used by the generators.
struct SaCflLayout {
  int n;
  std::vector<int> cheap, costly, dummy;  // dummy is empty for SaCfl
};
SaCflLayout sa_cfl_layout(const FamilyId& id);

/// ProperLbfl client groups. exclusive[i] for simplex facilities
/// i = 0..n-2; far holds the shared exclusive set of facilities n-1 and n.
struct ProperLbflLayout {
  int n;
  int bound;
  std::vector<std::vector<int>> exclusive;
  std::vector<int> far;
  int far_a, far_b;
};
ProperLbflLayout proper_lbfl_layout(int n);

/// TOY_PROPER client sets S1..S4.
std::vector<std::vector<int>> toy_proper_sets();

}  // namespace capfl
