// gapcli: generators, relaxations, liftings, cuts and constellations from
// the command line. Exit codes: 0 success, 2 input error, 3 size limit.

#include "capfl/classic.hpp"
#include "capfl/constellation.hpp"
#include "capfl/cuts.hpp"
#include "capfl/error.hpp"
#include "capfl/experiment.hpp"
#include "capfl/families.hpp"
#include "capfl/sa.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace capfl;

namespace {

struct InstanceArgs {
  std::string path;
  std::string family;
  int n = 4;
  std::string d = "1";
  std::string d_far;

  void add(CLI::App* app) {
    app->add_option("--instance", path, "Instance file");
    app->add_option("--family", family, "sa-cfl, effcap-cfl, sa-lbfl-simplex, proper-lbfl, proper-cfl, toy-proper");
    app->add_option("--n", n, "Family size parameter");
    app->add_option("--d", d, "Simplex edge length (proper-lbfl)");
    app->add_option("--d-far", d_far, "Far-point distance (proper-lbfl)");
  }

  std::optional<FamilyId> family_id() const {
    if (family.empty()) return std::nullopt;
    FamilyId id;
    id.family = parse_family(family);
    id.n = n;
    id.d = parse_rational(d);
    if (!d_far.empty()) id.d_far = parse_rational(d_far);
    return id;
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.family = family_id();
    s.instance_path = path;
    if (s.family.has_value() == !path.empty()) throw InputError("give exactly one of --instance and --family");
    return s;
  }

  Instance load() const { return load_instance(spec()); }
};

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::string solution_text(const FractionalSolution& sol) {
  std::ostringstream out;
  write_solution(sol, out);
  return out.str();
}

FractionalSolution solution_or_bad(const std::string& path, const InstanceArgs& ia, const Instance& inst) {
  if (!path.empty()) return read_solution_file(path, inst);
  auto id = ia.family_id();
  if (!id) throw InputError("--solution is required for file instances");
  return gen_bad_solution(*id);
}

// sa plus --level is shorthand for sa:<level>.
Relaxation relaxation_from(std::string name, int level) {
  if (name == "sa") name += ":" + std::to_string(level);
  return parse_relaxation(name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrality gap experiments for capacitated and lower-bounded facility location"};
  app.require_subcommand(1);

  InstanceArgs ia;
  std::string out_path;
  std::string relaxation = "classic";
  std::vector<std::string> relaxations;
  std::string classes_path;
  std::string solution_path;
  std::string cut_kind = "effective-capacity";
  std::string set = "rounds";
  std::string write_classes;
  int level = -1;
  int samples = 1000;
  std::uint64_t seed = 0;
  std::size_t cap = 200'000;
  bool timing = false;
  bool bad_solution = false;
  bool dump_system = false;
  bool serial = false;

  auto* gen = app.add_subcommand("gen", "Generate a family instance");
  ia.add(gen);
  gen->add_flag("--bad-solution", bad_solution, "Write the family's bad fractional solution instead");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  auto* solve_cmd = app.add_subcommand("solve", "Optimize a relaxation");
  ia.add(solve_cmd);
  solve_cmd->add_option("--relaxation", relaxation, "classic or sa (with --level)");
  solve_cmd->add_option("--level", level, "SA level");
  solve_cmd->add_option("--out", out_path, "Write the optimal (y, x) here");

  auto* ip = app.add_subcommand("ip", "Exact integer optimum");
  ia.add(ip);

  auto* gap = app.add_subcommand("gap", "Gap report for one or more relaxations");
  ia.add(gap);
  gap->add_option("--relaxation", relaxations, "classic, sa:k, constellation:<set>, classic+cuts:<kind>,<samples>,<seed>")
      ->required();
  gap->add_option("--level", level, "Rounds parameter (c for proper-lbfl, t for proper-cfl)");
  gap->add_option("--classes", classes_path, "Class file for constellation:file");
  gap->add_option("--cap", cap, "Class cap");
  gap->add_option("--out", out_path, "Report file (default stdout)");
  gap->add_flag("--timing", timing, "Add a wall-time column");
  gap->add_flag("--serial", serial, "Run the serial reference paths");

  auto* cuts = app.add_subcommand("cuts", "Sample cuts and separate a point");
  ia.add(cuts);
  cuts->add_option("--cut-kind", cut_kind, "flow-cover, effective-capacity, submodular, aggregate-capacity");
  cuts->add_option("--samples", samples, "Number of random cover draws")->check(CLI::PositiveNumber);
  cuts->add_option("--seed", seed, "Sampling seed");
  cuts->add_option("--solution", solution_path, "Point to separate (default: the family's bad solution)");

  auto* lift = app.add_subcommand("lift", "Build the SA lifting of LP-classic");
  ia.add(lift);
  lift->add_option("--level", level, "SA level")->required();
  lift->add_option("--solution", solution_path, "Check membership of this point");
  lift->add_flag("--dump", dump_system, "Print the lifted system");

  auto* cons = app.add_subcommand("constellation", "Build and check a constellation solution");
  ia.add(cons);
  cons->add_option("--set", set, "rounds, star, enriched, integral or file");
  cons->add_option("--level", level, "Rounds parameter (c for proper-lbfl, t for proper-cfl)");
  cons->add_option("--classes", classes_path, "Class file for --set file");
  cons->add_option("--samples", samples, "Monte-Carlo samples for rounds")->check(CLI::PositiveNumber);
  cons->add_option("--seed", seed, "Monte-Carlo seed");
  cons->add_option("--write-classes", write_classes, "Write the rounds class file here");
  cons->add_option("--cap", cap, "Class cap");

  auto* verify_cmd = app.add_subcommand("verify", "Exact feasibility of a solution");
  ia.add(verify_cmd);
  verify_cmd->add_option("--solution", solution_path, "Solution file")->required();
  verify_cmd->add_option("--relaxation", relaxation, "classic, sa:k, classic+cuts:..., constellation:<set>");
  verify_cmd->add_option("--level", level, "SA level when --relaxation sa");
  verify_cmd->add_option("--classes", classes_path, "Class file for constellation:file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      if (bad_solution) {
        auto id = ia.family_id();
        if (!id) throw InputError("--bad-solution needs --family");
        emit(out_path, solution_text(gen_bad_solution(*id)));
      } else {
        std::ostringstream text;
        write_instance(ia.load(), text);
        emit(out_path, text.str());
      }
    } else if (*solve_cmd) {
      const Instance inst = ia.load();
      const Relaxation rel = relaxation_from(relaxation, level);
      const LinearProgram lp = build_classic(inst).lp;
      SolveOutcome out;
      std::vector<Rational> point;
      if (rel.kind == RelaxationKind::Classic) {
        out = solve(lp);
        point = out.point;
      } else if (rel.kind == RelaxationKind::Sa) {
        LiftedSystem sys = build_sa(lp, rel.level);
        out = solve(sys.to_lp(lp.objective()));
        if (out.optimal()) {
          for (int v = 0; v < lp.num_variables(); ++v) point.push_back(out.point[static_cast<std::size_t>(sys.singleton(v))]);
        }
      } else {
        throw InputError("solve supports classic and sa:k; use gap for other relaxations");
      }
      if (!out.optimal()) {
        std::cout << "status\tinfeasible\n";
      } else {
        std::cout << "relaxation\t" << rel.name() << "\nvalue\t" << to_report(out.value) << '\n';
        if (!out_path.empty()) {
          emit(out_path, solution_text(FractionalSolution::from_vector(point, inst.num_facilities(), inst.num_clients())));
        }
      }
    } else if (*ip) {
      const IntegerOptimum opt = solve_ip(ia.load());
      if (!opt.feasible) {
        std::cout << "status\tinfeasible\n";
      } else {
        std::cout << "value\t" << to_report(opt.value) << "\nopen\t";
        for (std::size_t k = 0; k < opt.open.size(); ++k) std::cout << (k ? " " : "") << opt.open[k];
        std::cout << '\n';
      }
    } else if (*gap) {
      std::vector<ExperimentSpec> specs;
      for (std::size_t k = 0; k < relaxations.size(); ++k) {
        ExperimentSpec s = ia.spec();
        s.id = "e" + std::to_string(k + 1);
        s.relaxation = parse_relaxation(relaxations[k]);
        s.classes_path = classes_path;
        s.cap = cap;
        s.parallel = !serial;
        if (level >= 0) s.rounds_param = level;
        specs.push_back(std::move(s));
      }
      emit(out_path, format_report(run_batch(specs, !serial), timing));
    } else if (*cuts) {
      const Instance inst = ia.load();
      const FractionalSolution point = solution_or_bad(solution_path, ia, inst);
      const CutKind kind = parse_cut_kind(cut_kind);
      std::cout << "seed\t" << seed << "\nkind\t" << to_string(kind) << '\n';
      std::vector<ViolatedCut> violated;
      std::size_t drawn = 1;
      if (kind == CutKind::AggregateCapacity) {
        Cut c = aggregate_capacity_cut(inst);
        if (!c.satisfied_by(point)) violated.push_back({c, c.violation(point)});
      } else {
        drawn = sample_cuts(inst, kind, samples, seed).size();
        violated = separate_by_sampling(inst, point, kind, samples, seed);
      }
      std::cout << "cuts\t" << drawn << "\nviolated\t" << violated.size() << '\n';
      for (const ViolatedCut& v : violated) std::cout << dump(v.cut, inst) << "\tviolation " << to_string(v.violation) << '\n';
    } else if (*lift) {
      const Instance inst = ia.load();
      const LinearProgram lp = build_classic(inst).lp;
      const LiftedSystem sys = build_sa(lp, level);
      std::cout << "level\t" << level << "\nvariables\t" << sys.monomials.size() << "\nconstraints\t"
                << sys.constraints.size() << '\n';
      if (!solution_path.empty()) {
        const FractionalSolution sol = read_solution_file(solution_path, inst);
        const Membership m = sa_membership(sys, sol.to_vector());
        std::cout << "member\t" << (m.member ? "yes" : "no") << '\n';
      }
      if (dump_system) std::cout << sys.dump();
    } else if (*cons) {
      ExperimentSpec spec = ia.spec();
      spec.relaxation = parse_relaxation("constellation:" + set);
      spec.classes_path = classes_path;
      spec.cap = cap;
      if (level >= 0) spec.rounds_param = level;
      spec.validate();
      const Instance inst = load_instance(spec);
      if (set == "rounds") {
        const FamilyId& id = *spec.family;
        Rounds r = id.family == Family::ProperLbfl ? build_rounds_lbfl(id.n, spec.rounds_param, id.d, id.d_far)
                                                   : (id.family == Family::ProperCfl
                                                          ? build_rounds_cfl(id.n, spec.rounds_param)
                                                          : throw InputError("rounds need proper-lbfl or proper-cfl"));
        const Rational cost = solution_cost(r.instance, r.classes, r.solution);
        const auto bad = check_point(build_classic(r.instance).lp, r.target.to_vector());
        std::cout << "phi\t" << to_report(r.phi) << "\nxi\t" << to_report(r.xi) << "\ncost\t" << to_report(cost)
                  << "\nprojection\tequals target\nclassic-feasible\t" << (bad.empty() ? "yes" : "no") << '\n';
        const SampleStats st = sample_projection(r.instance, r.classes, r.solution, samples, seed);
        std::cout << "seed\t" << seed << "\nsamples\t" << samples << '\n';
        for (std::size_t i = 0; i < st.y_mean.size(); ++i) {
          std::cout << "facility " << i << "\ty " << to_decimal(r.target.y[i]) << " sampled " << st.y_mean[i] << " +- "
                    << st.y_sigma[i] << '\n';
        }
        if (!write_classes.empty()) {
          std::ostringstream text;
          write_class_file(r.classes, r.solution, text);
          emit(write_classes, text.str());
        }
      } else {
        std::cout << format_report({run(spec)});
      }
    } else if (*verify_cmd) {
      const Instance inst = ia.load();
      const FractionalSolution sol = read_solution_file(solution_path, inst);
      ExperimentSpec ctx = ia.spec();
      ctx.classes_path = classes_path;
      if (level >= 0) ctx.rounds_param = level;
      const Relaxation rel = relaxation_from(relaxation, level);
      const Verdict v = verify(inst, sol, rel, ctx);
      std::cout << "relaxation\t" << rel.name() << "\nverdict\t" << (v.feasible ? "feasible" : "infeasible") << '\n';
      for (const std::string& line : v.violations) std::cout << "violation\t" << line << '\n';
      return v.feasible ? 0 : 1;
    }
  } catch (const SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
