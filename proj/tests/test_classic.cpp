#include "capfl/classic.hpp"
#include "capfl/error.hpp"
#include "capfl/families.hpp"
#include "doctest.h"
#include "ip_oracles.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace capfl;

namespace {

FamilyId fam(Family f, int n = 4) {
  FamilyId id;
  id.family = f;
  id.n = n;
  return id;
}

}  // namespace

TEST_CASE("build_classic") {
  SUBCASE("single facility") {
    Instance inst(ProblemKind::CFL, {{Rational(5), 1}}, {{1}}, Rational(3));
    RelaxationBuild b = build_classic(inst);
    CHECK(b.lp.num_variables() == 2);
    auto out = solve(b.lp);
    REQUIRE(out.optimal());
    CHECK(out.value == 8);
    CHECK(out.point[static_cast<std::size_t>(b.y(0))] == 1);
    CHECK(out.point[static_cast<std::size_t>(b.x(0, 0))] == 1);
  }
  SUBCASE("SA_CFL n=4 optimum") {
    RelaxationBuild b = build_classic(gen_instance(fam(Family::SaCfl)));
    CHECK(b.lp.num_variables() == 8 + 8 * 257);
    auto out = solve(b.lp);
    REQUIRE(out.optimal());
    CHECK(out.value == make_rational(1, 64));
  }
  SUBCASE("SA_LBFL_SIMPLEX bad solution is feasible") {
    Instance inst = gen_instance(fam(Family::SaLbflSimplex));
    CHECK(check_point(build_classic(inst).lp, gen_bad_solution(fam(Family::SaLbflSimplex)).to_vector()).empty());
  }
  SUBCASE("constraint shape") {
    Instance inst(ProblemKind::LBFL, {{Rational(1), 2}, {Rational(2), 2}}, std::vector<Client>(3, Client{1}));
    RelaxationBuild b = build_classic(inst);
    CHECK(b.lp.num_constraints() == 2 * 3 + 3 + 2);
    const Constraint& last = b.lp.constraint(b.lp.num_constraints() - 1);
    CHECK(last.rel == Relation::GreaterEq);
  }
}

TEST_CASE("solve_ip on families") {
  SUBCASE("SA_CFL n=4") {
    IntegerOptimum opt = solve_ip(gen_instance(fam(Family::SaCfl)));
    REQUIRE(opt.feasible);
    CHECK(opt.value == 1);
    CHECK(opt.open.size() == 5);
  }
  SUBCASE("PROPER_CFL n=4") {
    IntegerOptimum opt = solve_ip(gen_instance(fam(Family::ProperCfl)));
    REQUIRE(opt.feasible);
    CHECK(opt.value == 1);
    CHECK(std::find(opt.open.begin(), opt.open.end(), 3) != opt.open.end());
  }
  SUBCASE("TOY_PROPER") {
    IntegerOptimum opt = solve_ip(gen_instance(fam(Family::ToyProper)));
    REQUIRE(opt.feasible);
    CHECK(opt.value == 0);
  }
  SUBCASE("subset cap") {
    IpOptions opt;
    opt.subset_cap = 16;
    CHECK_THROWS_AS(solve_ip(gen_instance(fam(Family::SaCfl)), opt), SizeLimitError);
  }
  SUBCASE("assignment respects bounds") {
    Instance inst = gen_instance(fam(Family::SaCfl));
    IntegerOptimum opt = solve_ip(inst);
    std::vector<int> load(8, 0);
    for (int f : opt.assignment) ++load[static_cast<std::size_t>(f)];
    for (int i = 0; i < 8; ++i) {
      bool open = std::binary_search(opt.open.begin(), opt.open.end(), i);
      CHECK((open || load[static_cast<std::size_t>(i)] == 0));
      CHECK(load[static_cast<std::size_t>(i)] <= 64);
    }
  }
}

TEST_CASE("integrality_gap") {
  CHECK(integrality_gap(1, make_rational(1, 64)).ratio == 64);
  CHECK(integrality_gap(1, make_rational(1, 16)).ratio == 16);
  CHECK(integrality_gap(make_rational(7, 3), make_rational(7, 3)).ratio == 1);
  CHECK(integrality_gap(0, 0).ratio == 1);
  Gap inf = integrality_gap(1, 0);
  CHECK(inf.infinite);
  CHECK(inf.to_string() == "inf");
  CHECK_THROWS_AS(integrality_gap(1, -1), InputError);
}

TEST_CASE("enumerate_integer_points") {
  SUBCASE("one facility, u=2, two clients") {
    Instance inst(ProblemKind::CFL, {{Rational(0), 2}}, std::vector<Client>(2, Client{1}));
    CHECK(enumerate_integer_points(inst).size() == 1);
  }
  SUBCASE("two facilities u=1, one client") {
    Instance inst(ProblemKind::CFL, {{Rational(0), 1}, {Rational(0), 1}}, {{1}});
    CHECK(enumerate_integer_points(inst).size() == 2);
    EnumerateOptions opt;
    opt.zero_load = true;
    CHECK(enumerate_integer_points(inst, opt).size() == 4);
  }
  SUBCASE("LBFL B=2, three clients") {
    Instance inst(ProblemKind::LBFL, {{Rational(0), 2}, {Rational(0), 2}}, std::vector<Client>(3, Client{1}));
    auto pts = enumerate_integer_points(inst);
    CHECK(pts.size() == 2);
  }
  SUBCASE("cap") {
    Instance inst(ProblemKind::CFL, {{Rational(0), 3}, {Rational(0), 3}}, std::vector<Client>(3, Client{1}));
    EnumerateOptions opt;
    opt.cap = 3;
    CHECK_THROWS_AS(enumerate_integer_points(inst, opt), SizeLimitError);
  }
  SUBCASE("zero-load points are the binary points of LP-classic") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
      ProblemKind kind = trial % 2 ? ProblemKind::LBFL : ProblemKind::CFL;
      int nf = 1 + trial % 3;
      int nc = 1 + (trial / 3) % 3;
      Instance inst = oracle::random_tiny(rng, kind, nf, nc);
      LinearProgram lp = build_classic(inst).lp;
      const int d = lp.num_variables();
      std::set<std::vector<Rational>> brute;
      for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        std::vector<Rational> p(static_cast<std::size_t>(d));
        for (int v = 0; v < d; ++v) p[static_cast<std::size_t>(v)] = (mask >> v) & 1u;
        if (check_point(lp, p).empty()) brute.insert(p);
      }
      EnumerateOptions opt;
      opt.zero_load = true;
      auto pts = enumerate_integer_points(inst, opt);
      CAPTURE(trial);
      CHECK(pts.size() == brute.size());
      CHECK(std::set<std::vector<Rational>>(pts.begin(), pts.end()) == brute);
    }
  }
}

TEST_CASE("IP oracles agree on tiny instances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    ProblemKind kind = trial % 2 ? ProblemKind::LBFL : ProblemKind::CFL;
    std::uniform_int_distribution<int> nf(1, 3), nc(1, 4);
    Instance inst = oracle::random_tiny(rng, kind, nf(rng), nc(rng));
    auto brute = oracle::brute_force_ip(inst);
    IntegerOptimum opt = solve_ip(inst);
    CAPTURE(trial);
    REQUIRE(opt.feasible == brute.has_value());
    if (!brute) continue;
    CHECK(opt.value == *brute);
    CHECK(opt.to_solution(inst).cost(inst) == opt.value);
    CHECK(check_point(build_classic(inst).lp, opt.to_solution(inst).to_vector()).empty());
    Rational best_point = -1;
    for (const auto& p : enumerate_integer_points(inst)) {
      Rational c = FractionalSolution::from_vector(p, inst.num_facilities(), inst.num_clients()).cost(inst);
      if (best_point < 0 || c < best_point) best_point = c;
    }
    CHECK(best_point == opt.value);
    auto lp = solve(build_classic(inst).lp);
    REQUIRE(lp.optimal());
    CHECK(lp.value <= opt.value);
  }
}

TEST_CASE("solve_ip rejects non-unit demands") {
  Instance inst(ProblemKind::CFL, {{Rational(0), 4}}, {{2}});
  CHECK_THROWS_AS(solve_ip(inst), InputError);
}
