#include "capfl/error.hpp"
#include "capfl/lp.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <functional>
#include <random>

using capfl::LinearProgram;
using capfl::Rational;
using capfl::Relation;
using capfl::SolveStatus;

TEST_CASE("rational parsing and rendering") {
  CHECK(capfl::parse_rational("6/8") == Rational(3, 4));
  CHECK(capfl::to_string(capfl::parse_rational("6/8")) == "3/4");
  CHECK(capfl::to_string(capfl::parse_rational("-10/5")) == "-2");
  CHECK(capfl::to_decimal(Rational(1, 64)) == "0.015625");
  CHECK(capfl::to_decimal(Rational(-1, 3), 3) == "-0.333");
  CHECK_THROWS_AS(capfl::parse_rational("1/0"), capfl::InputError);
  CHECK_THROWS_AS(capfl::parse_rational("1/-2"), capfl::InputError);
  CHECK_THROWS_AS(capfl::parse_rational("0.5"), capfl::InputError);
  CHECK(capfl::ceil(Rational(257, 64)) == 5);
}

TEST_CASE("solve: tiny textbook LPs") {
  SUBCASE("min x s.t. x >= 1/3, x <= 1") {
    LinearProgram lp;
    int x = lp.add_variable("x", std::nullopt, std::nullopt);
    lp.add_constraint({{x, 1}}, Relation::GreaterEq, Rational(1, 3));
    lp.add_constraint({{x, 1}}, Relation::LessEq, 1);
    lp.set_objective({{x, 1}});
    auto out = capfl::solve(lp);
    REQUIRE(out.optimal());
    CHECK(out.value == Rational(1, 3));
    CHECK(capfl::check_point(lp, out.point).empty());
  }
  SUBCASE("infeasible") {
    LinearProgram lp;
    int x = lp.add_variable("x", std::nullopt, std::nullopt);
    lp.add_constraint({{x, 1}}, Relation::LessEq, 0);
    lp.add_constraint({{x, 1}}, Relation::GreaterEq, 1);
    lp.set_objective({});
    CHECK(capfl::solve(lp).status == SolveStatus::Infeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    int x = lp.add_variable("x");
    int y = lp.add_variable("y");
    lp.add_constraint({{x, 1}, {y, -1}}, Relation::LessEq, 2);
    lp.set_objective({{x, -1}});
    CHECK(capfl::solve(lp).status == SolveStatus::Unbounded);
  }
  SUBCASE("maximize with equality") {
    LinearProgram lp;
    int x = lp.add_variable("x", Rational(0), Rational(4));
    int y = lp.add_variable("y", Rational(0), Rational(4));
    lp.add_constraint({{x, 1}, {y, 2}}, Relation::Equal, 5);
    lp.set_objective({{x, 3}, {y, 1}}, capfl::Sense::Maximize);
    auto out = capfl::solve(lp);
    REQUIRE(out.optimal());
    CHECK(out.value == Rational(25, 2));  // x = 4, y = 1/2
    CHECK(out.point[0] == 4);
    CHECK(out.point[1] == Rational(1, 2));
  }
}

TEST_CASE("solve: size cap is an explicit error") {
  LinearProgram lp;
  int x = lp.add_variable("x");
  lp.add_constraint({{x, 1}}, Relation::LessEq, 1);
  lp.add_constraint({{x, 1}}, Relation::LessEq, 2);
  capfl::SolveOptions options;
  options.max_nonzeros = 1;
  CHECK_THROWS_AS(capfl::solve(lp, options), capfl::SizeLimitError);
}

TEST_CASE("check_point names violated bounds and constraints") {
  LinearProgram lp;
  int y = lp.add_variable("y", Rational(0), Rational(1));
  lp.add_constraint({{y, 1}}, Relation::GreaterEq, 0, "nonneg");
  std::vector<Rational> point{2};
  auto v = capfl::check_point(lp, point);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == capfl::Violation::Kind::UpperBound);
  CHECK(v[0].describe(lp).find("y <= 1") != std::string::npos);
  std::vector<Rational> short_point;
  CHECK_THROWS_AS(capfl::check_point(lp, short_point), capfl::InputError);
}

TEST_CASE("undeclared variable is rejected") {
  LinearProgram lp;
  lp.add_variable("x");
  CHECK_THROWS_AS(lp.add_constraint({{3, 1}}, Relation::LessEq, 1), capfl::InputError);
}

TEST_CASE("property: simplex optimum equals vertex enumeration on random small LPs") {
  std::mt19937_64 rng(20241);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    std::uniform_int_distribution<int> nvars(1, 6);
    std::uniform_int_distribution<int> ncons(1, 8);
    std::uniform_int_distribution<int> rel(0, 5);
    const int n = nvars(rng);
    const int m = ncons(rng);
    std::vector<oracle::DenseRow> rows;
    for (int i = 0; i < m; ++i) {
      oracle::DenseRow row;
      for (int j = 0; j < n; ++j) row.a.push_back(oracle::small_rational(rng, -3, 3));
      int r = rel(rng);
      row.rel = r == 0 ? Relation::Equal : (r < 3 ? Relation::GreaterEq : Relation::LessEq);
      row.b = oracle::small_rational(rng, -4, 6);
      rows.push_back(row);
    }
    std::vector<Rational> c;
    for (int j = 0; j < n; ++j) c.push_back(oracle::small_rational(rng, -5, 5));

    // Box 0 <= x <= 2 as explicit rows for the oracle, as variable bounds for the solver.
    std::vector<oracle::DenseRow> boxed = rows;
    for (int j = 0; j < n; ++j) {
      oracle::DenseRow lo{std::vector<Rational>(static_cast<std::size_t>(n)), Relation::GreaterEq, 0};
      lo.a[static_cast<std::size_t>(j)] = 1;
      oracle::DenseRow hi{lo.a, Relation::LessEq, 2};
      boxed.push_back(lo);
      boxed.push_back(hi);
    }
    auto expected = oracle::min_by_vertex_enumeration(boxed, c);

    LinearProgram lp = oracle::to_lp(rows, c, false);
    for (int j = 0; j < n; ++j) {
      lp.variable(j).lower = Rational(0);
      lp.variable(j).upper = Rational(2);
    }
    capfl::SolveOptions bland;
    bland.pivot = capfl::PivotRule::Bland;
    auto out = capfl::solve(lp);
    auto out_bland = capfl::solve(lp, bland);
    capfl::SolveOptions via_dual;
    via_dual.method = capfl::SolveMethod::Dual;
    auto out_dual = capfl::solve(lp, via_dual);
    if (!expected) {
      CHECK(out.status == SolveStatus::Infeasible);
      CHECK(out_bland.status == SolveStatus::Infeasible);
      CHECK(out_dual.status == SolveStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(out.optimal());
    REQUIRE(out_bland.optimal());
    REQUIRE(out_dual.optimal());
    CHECK(out.value == *expected);
    CHECK(out_bland.value == *expected);
    CHECK(out_dual.value == *expected);
    CHECK(capfl::check_point(lp, out_dual.point).empty());
    CHECK(capfl::check_point(lp, out.point).empty());
    CHECK(capfl::check_point(lp, out_bland.point).empty());
    auto again = capfl::solve(lp);
    CHECK(again.point == out.point);
    ++optimal;
  }
  CHECK(optimal > 20);
  CHECK(infeasible > 5);
}

TEST_CASE("dual route") {
  SUBCASE("maximize with mixed rows") {
    LinearProgram lp;
    int x = lp.add_variable("x", Rational(0), Rational(3));
    int y = lp.add_variable("y", Rational(0), Rational(3));
    lp.add_constraint({{x, 1}, {y, 1}}, Relation::LessEq, 4);
    lp.add_constraint({{x, 1}, {y, -1}}, Relation::GreaterEq, capfl::make_rational(-1, 2));
    lp.add_constraint({{x, 2}, {y, 1}}, Relation::Equal, 5);
    lp.set_objective({{x, 1}, {y, 2}}, capfl::Sense::Maximize);
    capfl::SolveOptions opt;
    opt.method = capfl::SolveMethod::Dual;
    auto d = capfl::solve(lp, opt);
    opt.method = capfl::SolveMethod::Primal;
    auto p = capfl::solve(lp, opt);
    REQUIRE(d.optimal());
    REQUIRE(p.optimal());
    CHECK(d.value == p.value);
    CHECK(d.value == capfl::make_rational(11, 2));
  }
  SUBCASE("needs variables boxed from zero") {
    LinearProgram lp;
    lp.add_variable("x", Rational(0), std::nullopt);
    capfl::SolveOptions opt;
    opt.method = capfl::SolveMethod::Dual;
    CHECK_THROWS_AS(capfl::solve(lp, opt), capfl::InputError);
  }
  SUBCASE("primal duals price out the basis") {
    LinearProgram lp;
    int x = lp.add_variable("x", Rational(0), Rational(5));
    int y = lp.add_variable("y", Rational(0), Rational(5));
    lp.add_constraint({{x, 1}, {y, 1}}, Relation::GreaterEq, 2);
    lp.set_objective({{x, 1}, {y, 3}});
    capfl::SolveOptions opt;
    opt.method = capfl::SolveMethod::Primal;
    auto out = capfl::solve(lp, opt);
    REQUIRE(out.optimal());
    REQUIRE(out.duals.size() == 1);
    CHECK(out.value == 2);
    CHECK(abs(out.duals[0]) == 1);
  }
}

TEST_CASE("convex_decompose") {
  SUBCASE("target equal to a candidate") {
    std::vector<std::vector<Rational>> cands{{1, 0, 1}, {0, 1, 1}};
    std::vector<Rational> target{1, 0, 1};
    auto w = capfl::convex_decompose(target, cands);
    REQUIRE(w.in_hull);
    CHECK(w.weights[0] == 1);
    CHECK(w.weights[1] == 0);
  }
  SUBCASE("midpoint of two 0-1 points") {
    std::vector<std::vector<Rational>> cands{{1, 0}, {0, 1}};
    std::vector<Rational> target{Rational(1, 2), Rational(1, 2)};
    auto w = capfl::convex_decompose(target, cands);
    REQUIRE(w.in_hull);
    CHECK(w.weights[0] == Rational(1, 2));
    CHECK(w.weights[1] == Rational(1, 2));
  }
  SUBCASE("outside the hull") {
    std::vector<std::vector<Rational>> cands{{1, 0}, {0, 1}};
    std::vector<Rational> target{Rational(1, 2), Rational(1, 3)};
    CHECK_FALSE(capfl::convex_decompose(target, cands).in_hull);
  }
  SUBCASE("errors") {
    std::vector<Rational> target{1};
    CHECK_THROWS_AS(capfl::convex_decompose(target, {}), capfl::InputError);
    CHECK_THROWS_AS(capfl::convex_decompose(target, {{1, 2}}), capfl::InputError);
  }
  SUBCASE("property: reconstruction is exact") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<std::vector<Rational>> cands;
      std::bernoulli_distribution bit(0.5);
      for (int k = 0; k < 6; ++k) {
        std::vector<Rational> p;
        for (int v = 0; v < 5; ++v) p.push_back(bit(rng) ? 1 : 0);
        cands.push_back(p);
      }
      std::vector<Rational> target(5);
      for (int k = 0; k < 3; ++k) {
        for (int v = 0; v < 5; ++v) target[static_cast<std::size_t>(v)] += cands[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)] / 3;
      }
      auto w = capfl::convex_decompose(target, cands);
      REQUIRE(w.in_hull);
      std::vector<Rational> rebuilt(5);
      Rational total = 0;
      for (std::size_t k = 0; k < cands.size(); ++k) {
        CHECK(w.weights[k] >= 0);
        total += w.weights[k];
        for (std::size_t v = 0; v < 5; ++v) rebuilt[v] += w.weights[k] * cands[k][v];
      }
      CHECK(total == 1);
      CHECK(rebuilt == target);
    }
  }
}
