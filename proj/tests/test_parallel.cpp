#include "capfl/classic.hpp"
#include "capfl/constellation.hpp"
#include "capfl/cuts.hpp"
#include "capfl/experiment.hpp"
#include "capfl/families.hpp"
#include "capfl/sa.hpp"
#include "doctest.h"

#include <omp.h>

using namespace capfl;

namespace {

FamilyId fam(Family f, int n = 4) {
  FamilyId id;
  id.family = f;
  id.n = n;
  return id;
}

std::vector<std::string> dumps(const std::vector<Cut>& cuts, const Instance& inst) {
  std::vector<std::string> out;
  for (const Cut& c : cuts) out.push_back(dump(c, inst));
  return out;
}

}  // namespace

TEST_CASE("solve_ip serial and parallel agree") {
  for (Family f : {Family::SaCfl, Family::ProperCfl, Family::ToyProper, Family::ProperLbfl}) {
    Instance inst = gen_instance(fam(f));
    IpOptions serial;
    serial.parallel = false;
    IntegerOptimum a = solve_ip(inst, serial);
    IntegerOptimum b = solve_ip(inst);
    CAPTURE(to_string(f));
    CHECK(a.value == b.value);
    CHECK(a.open == b.open);
    CHECK(a.assignment == b.assignment);
  }
}

TEST_CASE("build_sa serial and parallel agree") {
  Instance inst(ProblemKind::CFL, {{Rational(1), 1}, {Rational(2), 2}}, std::vector<Client>(2, Client{1}));
  LinearProgram base = build_classic(inst).lp;
  SaOptions serial;
  serial.parallel = false;
  for (int k = 1; k <= 2; ++k) {
    LiftedSystem a = build_sa(base, k, serial);
    LiftedSystem b = build_sa(base, k);
    CHECK(a.monomials == b.monomials);
    CHECK(a.dump() == b.dump());
  }
}

TEST_CASE("sample_cuts is independent of thread count") {
  Instance inst = gen_instance(fam(Family::EffcapCfl));
  SamplingOptions serial;
  serial.parallel = false;
  for (CutKind kind : {CutKind::EffectiveCapacity, CutKind::Submodular, CutKind::FlowCover}) {
    auto a = dumps(sample_cuts(inst, kind, 300, 7, serial), inst);
    auto b = dumps(sample_cuts(inst, kind, 300, 7), inst);
    CHECK(a == b);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(3);
    auto c = dumps(sample_cuts(inst, kind, 300, 7), inst);
    omp_set_num_threads(saved);
    CHECK(a == c);
  }
}

TEST_CASE("enumerate_rounds_lbfl serial and parallel agree") {
  Rounds r = build_rounds_lbfl(4, 2);
  EnumeratedRounds a = enumerate_rounds_lbfl(4, 2, r.phi, r.xi, 5'000'000, false);
  EnumeratedRounds b = enumerate_rounds_lbfl(4, 2, r.phi, r.xi, 5'000'000, true);
  CHECK(a.type_a == b.type_a);
  CHECK(a.type_b == b.type_b);
  CHECK(a.projection == b.projection);
}

TEST_CASE("sample_projection serial and parallel agree") {
  Rounds r = build_rounds_cfl(4, 1);
  SampleStats a = sample_projection(r.instance, r.classes, r.solution, 5500, 3, false);
  SampleStats b = sample_projection(r.instance, r.classes, r.solution, 5500, 3, true);
  CHECK(a.y_mean == b.y_mean);
  CHECK(a.y_sigma == b.y_sigma);
  CHECK(a.load_mean == b.load_mean);
  CHECK(a.load_sigma == b.load_sigma);
}

TEST_CASE("run_batch keeps order and matches serial runs") {
  std::vector<ExperimentSpec> specs;
  auto add = [&](const std::string& id, Family f, const std::string& rel) {
    ExperimentSpec s;
    s.id = id;
    s.family = fam(f);
    s.relaxation = parse_relaxation(rel);
    specs.push_back(s);
  };
  add("a", Family::SaCfl, "classic");
  add("b", Family::ProperCfl, "constellation:rounds");
  add("c", Family::ToyProper, "constellation:star");
  add("d", Family::EffcapCfl, "classic+cuts:effective-capacity,200,1");
  auto serial = run_batch(specs, false);
  auto parallel = run_batch(specs, true);
  REQUIRE(serial.size() == specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) CHECK(parallel[k].id == specs[k].id);
  CHECK(format_report(serial) == format_report(parallel));
}
