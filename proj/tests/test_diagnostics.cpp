#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "support/test_helpers.hpp"

using namespace mineq;

TEST_CASE("check_sn_conditions composes the penalty and SN quantile") {
  // n = 400, beta = 0.001, C = 2, delta = 1, p = 200, M = 1:
  // sqrt(n) lambda = 5.47954, (4/3) c^{SN}(beta) = 6.03868 -> highlevel true.
  const auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 1.0);
  const auto r = check_sn_conditions(q);
  CHECK(!r.degenerate);
  CHECK(r.highlevel);
  CHECK(r.slack_highlevel ==
        Catch::Approx(6.038684907691471 - 5.47953676606991).epsilon(1e-9));
}

TEST_CASE("lowlevel clause violations") {
  SECTION("tiny M fails the moment clause") {
    auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 0.02);
    // M^2 n^{2/3} = 0.0004 * 54.28 << 2
    // (the penalty is degenerate here as well)
    const auto r = check_sn_conditions(q);
    CHECK(!r.moment_clause);
    CHECK(!r.lowlevel);
    CHECK(r.degenerate);
    CHECK(r.highlevel);  // vacuous
  }
  SECTION("large beta fails the first clause") {
    auto q = PowerRegionQuery::with_c_factor(400, 200, 0.2, 2.0, 1.0, 5.0);
    const auto r = check_sn_conditions(q);
    CHECK(!r.beta_clause);
    CHECK(!r.lowlevel);
  }
  SECTION("comfortable configuration satisfies lowlevel") {
    auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 5.0);
    const auto r = check_sn_conditions(q);
    CHECK(r.lowlevel);
    CHECK(r.highlevel);
  }
}

TEST_CASE("check_boot_conditions") {
  SECTION("hand-checked tail condition") {
    // n = 400, delta = 1, eps = 2/3, M = 10, beta = 0.001:
    // argument = (3/2^{3/2}) * 2 * 400^{1/6} / 10 = 0.575815,
    // 1 - Phi = 0.282370 >= 0.003 -> true.
    auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 10.0);
    const auto r = check_boot_conditions(q);
    CHECK(r.cond_2ssuff);
    CHECK(r.slack_2ssuff == Catch::Approx(0.2823701400905453 - 0.003).epsilon(1e-9));
    CHECK(!r.cond_2ssuff2.has_value());  // no rho supplied
  }
  SECTION("beta near zero satisfies the tail condition") {
    auto q = PowerRegionQuery::with_c_factor(400, 200, 1e-9, 2.0, 1.0, 1.0);
    CHECK(check_boot_conditions(q).cond_2ssuff);
  }
  SECTION("perfect correlation defeats the second condition") {
    auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 10.0);
    q.rho = 1.0;
    const auto r = check_boot_conditions(q);
    REQUIRE(r.cond_2ssuff2.has_value());
    CHECK(!*r.cond_2ssuff2);
  }
  SECTION("zero correlation with a generous M satisfies it") {
    auto q = PowerRegionQuery::with_c_factor(400, 1000, 0.001, 2.0, 1.0, 50.0);
    q.rho = 0.0;
    const auto r = check_boot_conditions(q);
    REQUIRE(r.cond_2ssuff2.has_value());
    CHECK(*r.cond_2ssuff2);
  }
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(PowerRegionQuery::with_c_factor(400, 200, 0.001, 1.0, 1.0, 1.0),
                  std::invalid_argument);  // C <= 4/3
  auto q = PowerRegionQuery::with_c_factor(400, 200, 0.001, 2.0, 1.0, 1.0);
  q.M = 0.0;
  CHECK_THROWS_AS(check_sn_conditions(q), std::invalid_argument);
  q.M = 1.0;
  q.beta_n = 0.0;
  CHECK_THROWS_AS(check_sn_conditions(q), std::invalid_argument);
}

TEST_CASE("heatmap grid shape, corners and nesting on a coarse grid") {
  const auto grid = heatmap_grid(400, 0.001, 2.0, 1.0, 0.0, 10.0, 21, 1, 1000, 25);
  CHECK(grid.M_values.size() == 21);
  CHECK(grid.p_values.size() == 25);
  REQUIRE(grid.cells.size() == 21 * 25);

  for (const auto& cell : grid.cells) {
    if (cell.M == 0.0) {
      CHECK(cell.degenerate);
    }
    // nesting: lowlevel true forces highlevel true
    if (cell.lowlevel) REQUIRE(cell.highlevel);
  }
  // the grid must exercise all three regimes
  int degenerate = 0, fail_high = 0, low = 0;
  for (const auto& cell : grid.cells) {
    degenerate += cell.degenerate;
    fail_high += (!cell.degenerate && !cell.highlevel);
    low += cell.lowlevel;
  }
  CHECK(degenerate > 0);
  CHECK(fail_high > 0);
  CHECK(low > 0);

  const std::string csv = grid.to_csv();
  CHECK(csv.find("p,M,highlevel,lowlevel,slack_high,slack_low,degenerate\n") == 0);
  std::size_t rows = 0;
  for (char ch : csv) rows += (ch == '\n');
  CHECK(rows == 21 * 25 + 1);
}

TEST_CASE("default grid fail fraction is small and frozen", "[heatmap][default-grid]") {
  // Full default grid (1000 p values x 101 M values), evaluated once and
  // frozen: the sharp condition fails on 7291 of 101000 cells (7.2%), the
  // 0 <= M <= 0.1 band (2000 cells) is degenerate.
  const auto grid = heatmap_grid();
  long fail = 0, degenerate = 0;
  for (const auto& cell : grid.cells) {
    fail += (!cell.degenerate && !cell.highlevel);
    degenerate += cell.degenerate;
  }
  CHECK(grid.cells.size() == 101000);
  CHECK(fail == 7291);
  CHECK(degenerate == 2000);
  CHECK(grid.highlevel_fail_fraction() == Catch::Approx(7291.0 / 101000.0).epsilon(1e-12));
}

TEST_CASE("third lowlevel clause is monotone in M once satisfied") {
  for (int p : {10, 200, 900}) {
    bool seen = false;
    for (double m = 0.5; m <= 10.0; m += 0.25) {
      const auto q = PowerRegionQuery::with_c_factor(400, p, 0.001, 2.0, 1.0, m);
      const bool third = check_sn_conditions(q).slack_lowlevel >= 0.0;
      if (seen) REQUIRE(third);
      seen = seen || third;
    }
    CHECK(seen);
  }
}

TEST_CASE("steps validation") {
  CHECK_THROWS_AS(heatmap_grid(400, 0.001, 2.0, 1.0, 0.0, 10.0, 1, 1, 1000, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(heatmap_grid(400, 0.001, 2.0, 1.0, 0.0, 10.0, 10, 1, 1000, 1),
                  std::invalid_argument);
}
