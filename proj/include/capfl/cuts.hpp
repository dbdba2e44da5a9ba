#pragma once

#include "capfl/instance.hpp"
#include "capfl/lp.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace capfl {

/// A facility set I, a client set J and per-facility client sets J_i.
struct CoverSpec {
  std::vector<int> facilities;                // I, sorted
  std::vector<int> clients;                   // J, sorted
  std::vector<std::vector<int>> reach;        // J_i, parallel to facilities, sorted
  std::vector<std::int64_t> effective;        // ū_i = min(u_i, d(J_i))
  std::int64_t excess = 0;                    // λ = Σ ū_i - d(J)

  /// Position of facility i in `facilities`, or -1.
  int position(int i) const;
};

/// Fills ū and λ. InputError when some J_i is not inside J, ids are out of
/// range or repeated, or the instance is not CFL.
CoverSpec effective_capacities(const Instance& inst, std::vector<int> facilities, std::vector<int> clients,
                               std::vector<std::vector<int>> reach);

/// Shorthand for J_i = J for every i in I.
CoverSpec effective_capacities(const Instance& inst, std::vector<int> facilities, std::vector<int> clients);

enum class CutKind { FlowCover, EffectiveCapacity, Submodular, AggregateCapacity };

std::string to_string(CutKind kind);
CutKind parse_cut_kind(const std::string& name);

struct CutTerm {
  int var;  // LP-classic layout: y_i = i, x_ij = |F| + i*|C| + j
  std::int64_t coef;
};

/// sum(terms) <rel> rhs, with integer coefficients.
struct Cut {
  CutKind kind = CutKind::FlowCover;
  std::vector<CutTerm> terms;  // sorted by var, no zeros
  Relation rel = Relation::LessEq;
  std::int64_t rhs = 0;
  std::optional<CoverSpec> cover;

  Rational lhs(const FractionalSolution& s) const;
  /// Amount by which s violates the cut; zero or negative when satisfied.
  Rational violation(const FractionalSolution& s) const;
  bool satisfied_by(const FractionalSolution& s) const { return sgn(violation(s)) <= 0; }
};

/// Σ_{i∈I}Σ_{j∈J} d_j x_ij + Σ_{i∈I} (u_i − λ)⁺ (1 − y_i) <= d(J).
/// Here λ = Σ_{i∈I} u_i − d(J) uses the raw capacities. Needs J_i = J for
/// all i and λ > 0.
Cut flow_cover_cut(const Instance& inst, const CoverSpec& spec);

/// Σ_{i∈I}Σ_{j∈J_i} d_j x_ij + Σ_{i∈I} (ū_i − λ)⁺ (1 − y_i) <= d(J).
/// Needs λ > 0 and max ū_i > λ.
Cut effective_capacity_cut(const Instance& inst, const CoverSpec& spec);

/// Three-level network: source -> facility (cap ū_i) -> client in J_i
/// (cap d_j) -> sink (cap d_j).
struct FlowNetwork {
  struct Arc {
    int from, to;
    std::int64_t cap;
  };
  int num_nodes = 2;
  int source = 0;
  int sink = 1;
  std::vector<int> facility_nodes;  // parallel to CoverSpec::facilities
  std::vector<Arc> arcs;

  static FlowNetwork build(const Instance& inst, const CoverSpec& spec);
};

/// Maximum s-t flow by shortest augmenting paths. `closed` is a position in
/// facility_nodes whose source arc is treated as zero capacity.
std::int64_t max_flow(const FlowNetwork& net, std::optional<int> closed = std::nullopt);

/// ρ_i(I∖{i}) = f(I) − f(I∖{i}). InputError when i is not in I.
std::int64_t increment(const Instance& inst, const CoverSpec& spec, int facility);

/// Σ_{i∈I}Σ_{j∈J_i} d_j x_ij + Σ_{i∈I} ρ_i(I∖{i}) (1 − y_i) <= f(I).
Cut submodular_cut(const Instance& inst, const CoverSpec& spec);

/// Σ_i y_i >= ⌈D/U⌉. InputError unless the instance is CFL with a uniform
/// capacity.
Cut aggregate_capacity_cut(const Instance& inst);

/// Builds the cut of the given kind, or nullopt when the spec does not meet
/// the kind's preconditions.
std::optional<Cut> make_cut(const Instance& inst, const CoverSpec& spec, CutKind kind);

struct SamplingOptions {
  /// Largest |I| drawn; also capped by |F| and 8.
  int max_facilities = 8;
  /// Largest |J| kept after the draw.
  int max_clients = 64;
  bool parallel = true;
};

/// Draws `samples` random cover specs, one sub-seed per draw, and returns the
/// cuts of `kind` whose preconditions hold, in draw order.
std::vector<Cut> sample_cuts(const Instance& inst, CutKind kind, int samples, std::uint64_t seed,
                             const SamplingOptions& options = {});

struct ViolatedCut {
  Cut cut;
  Rational violation;
};

/// The sampled cuts that `point` violates, with exact violation amounts.
std::vector<ViolatedCut> separate_by_sampling(const Instance& inst, const FractionalSolution& point, CutKind kind,
                                              int samples, std::uint64_t seed, const SamplingOptions& options = {});

/// Calls `visit` for every (I, J, {J_i}) with I nonempty. Meant for tiny
/// instances; SizeLimitError when there are more than `cap` specs.
void for_each_cover_spec(const Instance& inst, const std::function<void(const CoverSpec&)>& visit,
                         std::uint64_t cap = 10'000'000);

/// One line: kind, provenance sets, inequality in LP text form.
std::string dump(const Cut& cut, const Instance& inst);

}  // namespace capfl
