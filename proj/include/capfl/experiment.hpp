#pragma once

#include "capfl/classic.hpp"
#include "capfl/cuts.hpp"
#include "capfl/families.hpp"
#include "capfl/instance.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace capfl {

enum class RelaxationKind { Classic, Sa, Constellation, ClassicCuts };

/// Parsed relaxation names:
///   classic
///   sa:<k>
///   constellation:<star|enriched|integral|rounds|file>
///   classic+cuts:<kind>,<samples>,<seed>
struct Relaxation {
  RelaxationKind kind = RelaxationKind::Classic;
  int level = 0;              // sa
  std::string constellation;  // star, enriched, integral, rounds, file
  CutKind cut_kind = CutKind::EffectiveCapacity;
  int samples = 1000;
  std::uint64_t seed = 0;

  std::string name() const;
};

/// InputError on an unknown name, k < 0 or samples < 1.
Relaxation parse_relaxation(const std::string& text);

struct ExperimentSpec {
  std::string id;
  /// Exactly one of family and instance_path is set.
  std::optional<FamilyId> family;
  std::string instance_path;
  Relaxation relaxation;
  /// Class file for constellation:file.
  std::string classes_path;
  /// c for proper-lbfl rounds, t for proper-cfl rounds.
  int rounds_param = 2;
  std::size_t cap = 200'000;
  bool parallel = true;

  /// InputError on a violated invariant; checks that referenced files exist.
  void validate() const;
};

struct ReportRow {
  std::string id;
  std::string instance;
  std::string relaxation;
  /// Empty when the relaxation is infeasible for the experiment.
  std::optional<Rational> relaxation_value;
  Rational ip_value;
  std::optional<Gap> gap;
  std::string note;
  double seconds = 0;
};

/// Runs one experiment. SizeLimitError and InputError are rethrown with the
/// failing stage prefixed ("relaxation: ...", "ip: ...").
ReportRow run(const ExperimentSpec& spec);

/// Runs experiments concurrently; rows keep spec order.
std::vector<ReportRow> run_batch(const std::vector<ExperimentSpec>& specs, bool parallel = true);

/// Tab-separated, header first, rationals as "p/q(≈decimal)". The seconds
/// column appears only when `timing` is set, so reports diff cleanly.
std::string format_report(const std::vector<ReportRow>& rows, bool timing = false);

Instance load_instance(const ExperimentSpec& spec);

struct Verdict {
  bool feasible = false;
  std::vector<std::string> violations;
};

/// Exact feasibility of `sol` for the relaxation. Classic lists every
/// violated row or bound; sa:k reports the membership verdict; classic+cuts
/// adds every sampled cut the point violates; constellation:<set> fits the
/// projection against the built-in class set.
Verdict verify(const Instance& inst, const FractionalSolution& sol, const Relaxation& relaxation,
               const std::optional<ExperimentSpec>& context = std::nullopt);

}  // namespace capfl
