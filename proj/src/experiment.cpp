#include "capfl/experiment.hpp"

#include "capfl/constellation.hpp"
#include "capfl/error.hpp"
#include "capfl/sa.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <sstream>

namespace capfl {

namespace {

template <class F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const SizeLimitError& e) {
    throw SizeLimitError(std::string(stage) + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), std::string(stage) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string(stage) + ": " + e.what());
  }
}

int parse_int(const std::string& text, const char* what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InputError(std::string(what) + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

bool is_toy(const Instance& inst) {
  FamilyId id;
  id.family = Family::ToyProper;
  return inst == gen_instance(id);
}

Rational optimum_or_throw(const LinearProgram& lp, const SolveOptions& options, const char* what) {
  SolveOutcome out = solve(lp, options);
  if (out.status == SolveStatus::Unbounded) throw std::logic_error(std::string(what) + " is unbounded");
  if (!out.optimal()) throw InputError(std::string(what) + " is infeasible");
  return out.value;
}

struct PooledFit {
  ClassSet classes;
  ProjectionFit fit;
};

PooledFit toy_fit(const Instance& inst, const FractionalSolution& target, bool enriched) {
  const auto pools = toy_proper_sets();
  const PoolSupport allowed = pool_support(target, pools);
  PooledFit out;
  out.classes = enriched ? pooled_enriched_classes(inst, pools, allowed) : pooled_star_classes(inst, pools, allowed);
  out.fit = fit_projection(inst, out.classes, target);
  return out;
}

Rounds rounds_for(const ExperimentSpec& spec) {
  if (!spec.family) throw InputError("constellation:rounds needs a family instance");
  const FamilyId& id = *spec.family;
  if (id.family == Family::ProperLbfl) return build_rounds_lbfl(id.n, spec.rounds_param, id.d, id.d_far);
  if (id.family == Family::ProperCfl) return build_rounds_cfl(id.n, spec.rounds_param);
  throw InputError("constellation:rounds needs proper-lbfl or proper-cfl");
}

// Explicit class sets; toy-proper star and enriched are handled by toy_fit.
ClassSet explicit_classes(const Instance& inst, const std::string& which, const ExperimentSpec* spec) {
  if (which == "star") return star_classes(inst, spec ? spec->cap : 200'000);
  if (which == "integral") return integral_class_set(inst, spec ? spec->cap : 200'000);
  if (which == "rounds") {
    if (!spec) throw InputError("constellation:rounds needs the experiment context");
    return rounds_for(*spec).classes;
  }
  if (which == "file") {
    if (!spec || spec->classes_path.empty()) throw InputError("constellation:file needs --classes");
    return read_class_file(spec->classes_path, inst).classes;
  }
  if (which == "enriched") throw InputError("constellation:enriched is defined for toy-proper only");
  throw InputError("unknown class set '" + which + "'");
}

struct RelaxResult {
  std::optional<Rational> value;
  std::string note;
};

RelaxResult run_constellation(const ExperimentSpec& spec, const Instance& inst) {
  const std::string& which = spec.relaxation.constellation;
  RelaxResult r;
  if ((which == "star" || which == "enriched") && is_toy(inst)) {
    PooledFit pf = toy_fit(inst, toy_target(inst), which == "enriched");
    r.note = std::string("target-fit=") + (pf.fit.feasible ? "feasible" : "infeasible") +
             " complexity=" + to_string(complexity(pf.classes, inst)) +
             " orbits=" + std::to_string(pf.classes.orbits.size());
    if (pf.fit.feasible) r.value = solution_cost(inst, pf.classes, pf.fit.solution);
    return r;
  }
  if (which == "rounds") {
    Rounds rounds = rounds_for(spec);
    r.value = solution_cost(rounds.instance, rounds.classes, rounds.solution);
    auto bad = check_point(build_classic(rounds.instance).lp, rounds.target.to_vector());
    r.note = "phi=" + to_string(rounds.phi) + " xi=" + to_string(rounds.xi) +
             " classic-feasible=" + (bad.empty() ? "yes" : "no");
    return r;
  }
  if (which == "file") {
    if (spec.classes_path.empty()) throw InputError("constellation:file needs --classes");
    ClassFile file = read_class_file(spec.classes_path, inst);
    bool weighted = false;
    for (const auto& w : file.solution.class_weights) weighted = weighted || sgn(w) != 0;
    for (const auto& w : file.solution.orbit_weights) weighted = weighted || sgn(w) != 0;
    if (weighted) {
      r.value = solution_cost(inst, file.classes, file.solution);
      auto bad = check_point(build_classic(inst).lp, project(inst, file.classes, file.solution).to_vector());
      r.note = std::string("weighted classic-feasible=") + (bad.empty() ? "yes" : "no");
      return r;
    }
    LinearProgram lp = build_constellation_lp(inst, file.classes, spec.cap);
    SolveOutcome out = solve(lp);
    if (out.optimal()) r.value = out.value;
    r.note = "classes=" + std::to_string(lp.num_variables());
    return r;
  }
  ClassSet cs = explicit_classes(inst, which, &spec);
  LinearProgram lp = build_constellation_lp(inst, cs, spec.cap);
  SolveOutcome out = solve(lp);
  if (out.optimal()) r.value = out.value;
  r.note = "classes=" + std::to_string(lp.num_variables());
  return r;
}

void add_cut(LinearProgram& lp, const Cut& cut) {
  std::vector<Term> terms;
  for (const CutTerm& t : cut.terms) terms.push_back({t.var, Rational(static_cast<long>(t.coef))});
  lp.add_constraint(std::move(terms), cut.rel, Rational(static_cast<long>(cut.rhs)), to_string(cut.kind));
}

RelaxResult run_classic_cuts(const Relaxation& rel, const Instance& inst, bool parallel) {
  RelaxationBuild build = build_classic(inst);
  SamplingOptions sopt;
  sopt.parallel = parallel;
  int added = 0;
  int round = 0;
  RelaxResult r;
  constexpr int max_rounds = 10;
  for (;; ++round) {
    SolveOutcome out = solve(build.lp);
    if (!out.optimal()) throw InputError("LP-classic is infeasible");
    r.value = out.value;
    if (round == max_rounds) break;
    FractionalSolution point = FractionalSolution::from_vector(out.point, inst.num_facilities(), inst.num_clients());
    std::vector<Cut> violated;
    if (rel.cut_kind == CutKind::AggregateCapacity) {
      Cut cut = aggregate_capacity_cut(inst);
      if (!cut.satisfied_by(point)) violated.push_back(cut);
    } else {
      for (auto& v : separate_by_sampling(inst, point, rel.cut_kind, rel.samples, rel.seed + static_cast<std::uint64_t>(round), sopt)) {
        violated.push_back(std::move(v.cut));
      }
    }
    if (violated.empty()) break;
    for (const Cut& c : violated) add_cut(build.lp, c);
    added += static_cast<int>(violated.size());
  }
  r.note = "cuts=" + std::to_string(added) + " rounds=" + std::to_string(round) + " seed=" + std::to_string(rel.seed);
  return r;
}

std::string instance_name(const ExperimentSpec& spec) {
  if (!spec.family) return spec.instance_path;
  if (spec.family->family == Family::ToyProper) return to_string(spec.family->family);
  return to_string(spec.family->family) + ":" + std::to_string(spec.family->n);
}

}  // namespace

std::string Relaxation::name() const {
  switch (kind) {
    case RelaxationKind::Classic: return "classic";
    case RelaxationKind::Sa: return "sa:" + std::to_string(level);
    case RelaxationKind::Constellation: return "constellation:" + constellation;
    case RelaxationKind::ClassicCuts:
      return "classic+cuts:" + to_string(cut_kind) + "," + std::to_string(samples) + "," + std::to_string(seed);
  }
  return "";
}

Relaxation parse_relaxation(const std::string& text) {
  Relaxation r;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (head == "classic" && colon == std::string::npos) {
    r.kind = RelaxationKind::Classic;
  } else if (head == "sa") {
    r.kind = RelaxationKind::Sa;
    r.level = parse_int(arg, "sa level");
    if (r.level < 0) throw InputError("sa level must be >= 0");
  } else if (head == "constellation") {
    r.kind = RelaxationKind::Constellation;
    r.constellation = arg;
    if (arg != "star" && arg != "enriched" && arg != "integral" && arg != "rounds" && arg != "file") {
      throw InputError("unknown class set '" + arg + "'; expected star, enriched, integral, rounds or file");
    }
  } else if (head == "classic+cuts") {
    r.kind = RelaxationKind::ClassicCuts;
    auto parts = split(arg, ',');
    if (parts.empty() || parts.size() > 3) throw InputError("classic+cuts expects <kind>[,<samples>[,<seed>]]");
    r.cut_kind = parse_cut_kind(parts[0]);
    if (parts.size() > 1) r.samples = parse_int(parts[1], "samples");
    if (parts.size() > 2) {
      int s = parse_int(parts[2], "seed");
      if (s < 0) throw InputError("seed must be >= 0");
      r.seed = static_cast<std::uint64_t>(s);
    }
    if (r.samples < 1) throw InputError("samples must be >= 1");
  } else {
    throw InputError("unknown relaxation '" + text + "'");
  }
  return r;
}

void ExperimentSpec::validate() const {
  if (family.has_value() == !instance_path.empty()) throw InputError("give exactly one of a family or an instance file");
  if (family) check_family(*family);
  if (!instance_path.empty() && !std::filesystem::exists(instance_path)) {
    throw InputError("instance file '" + instance_path + "' does not exist");
  }
  if (relaxation.kind == RelaxationKind::Sa && relaxation.level < 0) throw InputError("sa level must be >= 0");
  if (relaxation.kind == RelaxationKind::ClassicCuts && relaxation.samples < 1) throw InputError("samples must be >= 1");
  if (relaxation.kind == RelaxationKind::Constellation && relaxation.constellation == "file") {
    if (classes_path.empty()) throw InputError("constellation:file needs --classes");
    if (!std::filesystem::exists(classes_path)) throw InputError("class file '" + classes_path + "' does not exist");
  }
}

Instance load_instance(const ExperimentSpec& spec) {
  if (spec.family) return gen_instance(*spec.family);
  return read_instance_file(spec.instance_path);
}

ReportRow run(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  staged("spec", [&] { spec.validate(); });
  const Instance inst = staged("instance", [&] { return load_instance(spec); });
  ReportRow row;
  row.id = spec.id;
  row.instance = instance_name(spec);
  row.relaxation = spec.relaxation.name();

  RelaxResult relax = staged("relaxation", [&]() -> RelaxResult {
    const Relaxation& rel = spec.relaxation;
    switch (rel.kind) {
      case RelaxationKind::Classic:
        return {optimum_or_throw(build_classic(inst).lp, {}, "LP-classic"), ""};
      case RelaxationKind::Sa: {
        SaOptions opt;
        opt.parallel = spec.parallel;
        SolveOutcome out = sa_optimize(build_classic(inst).lp, rel.level, opt);
        RelaxResult r;
        if (out.optimal()) r.value = out.value;
        return r;
      }
      case RelaxationKind::Constellation:
        return run_constellation(spec, inst);
      case RelaxationKind::ClassicCuts:
        return run_classic_cuts(rel, inst, spec.parallel);
    }
    return {};
  });
  row.relaxation_value = relax.value;
  row.note = relax.note;

  IntegerOptimum ip = staged("ip", [&] {
    IpOptions opt;
    opt.parallel = spec.parallel;
    return solve_ip(inst, opt);
  });
  if (!ip.feasible) throw InputError("ip: instance has no integer solution");
  row.ip_value = ip.value;
  if (row.relaxation_value) row.gap = integrality_gap(row.ip_value, *row.relaxation_value);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<ReportRow> run_batch(const std::vector<ExperimentSpec>& specs, bool parallel) {
  std::vector<ReportRow> rows(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const long n = static_cast<long>(specs.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      rows[i] = run(specs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string format_report(const std::vector<ReportRow>& rows, bool timing) {
  std::ostringstream out;
  out << "id\tinstance\trelaxation\trelaxation_value\tip_value\tgap\tnote";
  if (timing) out << "\tseconds";
  out << '\n';
  for (const ReportRow& r : rows) {
    out << r.id << '\t' << r.instance << '\t' << r.relaxation << '\t'
        << (r.relaxation_value ? to_report(*r.relaxation_value) : "infeasible") << '\t' << to_report(r.ip_value)
        << '\t';
    if (!r.gap) {
      out << '-';
    } else if (r.gap->infinite) {
      out << "inf";
    } else {
      out << to_report(r.gap->ratio);
    }
    out << '\t' << (r.note.empty() ? "-" : r.note);
    if (timing) out << '\t' << r.seconds;
    out << '\n';
  }
  return out.str();
}

Verdict verify(const Instance& inst, const FractionalSolution& sol, const Relaxation& relaxation,
               const std::optional<ExperimentSpec>& context) {
  if (sol.y.size() != static_cast<std::size_t>(inst.num_facilities()) ||
      sol.x.size() != static_cast<std::size_t>(inst.num_facilities())) {
    throw InputError("solution dimensions do not match the instance");
  }
  Verdict v;
  const RelaxationBuild build = build_classic(inst);
  const std::vector<Rational> point = sol.to_vector();
  auto classic_violations = [&] {
    for (const Violation& bad : check_point(build.lp, point)) v.violations.push_back(bad.describe(build.lp));
  };
  switch (relaxation.kind) {
    case RelaxationKind::Classic:
      classic_violations();
      break;
    case RelaxationKind::Sa: {
      classic_violations();
      Membership m = sa_membership(build.lp, relaxation.level, point);
      if (!m.member) v.violations.push_back("not a member of SA^" + std::to_string(relaxation.level));
      break;
    }
    case RelaxationKind::ClassicCuts: {
      classic_violations();
      if (relaxation.cut_kind == CutKind::AggregateCapacity) {
        Cut cut = aggregate_capacity_cut(inst);
        if (!cut.satisfied_by(sol)) {
          v.violations.push_back(dump(cut, inst) + " violated by " + to_string(cut.violation(sol)));
        }
      } else {
        for (const ViolatedCut& bad :
             separate_by_sampling(inst, sol, relaxation.cut_kind, relaxation.samples, relaxation.seed)) {
          v.violations.push_back(dump(bad.cut, inst) + " violated by " + to_string(bad.violation));
        }
      }
      break;
    }
    case RelaxationKind::Constellation: {
      const std::string& which = relaxation.constellation;
      bool feasible = false;
      if ((which == "star" || which == "enriched") && is_toy(inst)) {
        feasible = toy_fit(inst, sol, which == "enriched").fit.feasible;
      } else {
        const ExperimentSpec* spec = context ? &*context : nullptr;
        feasible = fit_projection(inst, explicit_classes(inst, which, spec), sol).feasible;
      }
      if (!feasible) v.violations.push_back("no nonnegative weights on " + relaxation.name() + " project onto the point");
      break;
    }
  }
  v.feasible = v.violations.empty();
  return v;
}

}  // namespace capfl
