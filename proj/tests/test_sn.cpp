#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support/test_helpers.hpp"

using namespace mineq;
using testutil::make_estimates;

TEST_CASE("sn_quantile hand-checked values") {
  SECTION("no conditions at all gives zero") {
    const SNContext ctx{400, 3, 3, 0.05};  // k = p, so m = d
    CHECK(sn_quantile(ctx, 0, 0.05) == 0.0);
  }
  SECTION("single condition at 5%") {
    const SNContext ctx{400, 1, 1, 0.05};
    CHECK(sn_quantile(ctx, 1, 0.05) == Catch::Approx(1.6504447850493267).epsilon(1e-10));
  }
  SECTION("a thousand conditions at 5%") {
    const SNContext ctx{400, 1000, 1000, 0.05};
    CHECK(sn_quantile(ctx, 1000, 0.05) == Catch::Approx(3.966362703483114).epsilon(1e-10));
  }
  SECTION("equalities count twice") {
    // k = 3, p = 1: m = 2*2 + d
    const SNContext ctx{400, 3, 1, 0.05};
    CHECK(sn_quantile(ctx, 1, 0.05) ==
          Catch::Approx(sn_quantile_value(400, 5, 0.05)).epsilon(1e-14));
  }
}

TEST_CASE("sn_quantile errors") {
  const SNContext ctx{400, 10, 10, 0.05};
  CHECK_THROWS_AS(sn_quantile(ctx, 11, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(sn_quantile(ctx, -1, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(sn_quantile(ctx, 10, 0.0), std::invalid_argument);

  // radicand failure reports the offending quantile
  try {
    sn_quantile_value(4, 1000000, 1e-6);
    FAIL("expected sample-too-small error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("requires n >") != std::string::npos);
  }

  const SNContext bad_alpha{400, 10, 10, 0.5};
  CHECK_THROWS_AS(sn_quantile(bad_alpha, 10, 0.05), std::invalid_argument);
}

TEST_CASE("sn_quantile is weakly increasing in the retained count") {
  for (int n : {100, 400}) {
    for (int p : {10, 1000}) {
      for (double level : {0.05, 0.1}) {
        const SNContext ctx{n, p, p, 0.05};
        double prev = sn_quantile(ctx, 0, level);
        for (int d = 1; d <= p; ++d) {
          const double cur = sn_quantile(ctx, d, level);
          REQUIRE(cur >= prev);
          prev = cur;
        }
      }
    }
  }
}

TEST_CASE("sn_quantile decreases in level and in n") {
  const SNContext ctx{400, 50, 50, 0.05};
  CHECK(sn_quantile(ctx, 50, 0.01) > sn_quantile(ctx, 50, 0.05));
  CHECK(sn_quantile(ctx, 50, 0.05) > sn_quantile(ctx, 50, 0.10));
  CHECK(sn_quantile_value(100, 50, 0.05) > sn_quantile_value(400, 50, 0.05));
  CHECK(sn_quantile_value(400, 50, 0.05) > sn_quantile_value(100000, 50, 0.05));
}

TEST_CASE("sn_first_step_set hand-checked example") {
  // n = 400, k = p = 2, beta = 0.001: cut = -2 * 3.33599 / 20
  const SNContext ctx{400, 2, 2, 0.05};
  const auto est = make_estimates({-0.3, -0.4}, {1.0, 1.0});
  const auto sel = sn_first_step_set(est, ctx, 0.001);
  CHECK(sel.indices == std::vector<int>{0});
  CHECK(sel.threshold == Catch::Approx(-0.3335987262389114).epsilon(1e-10));
  CHECK(sel.rule == SelectionRule::sn);
}

TEST_CASE("sn_first_step_set keeps non-negative ratios and drops -inf ones") {
  const SNContext ctx{400, 3, 3, 0.05};
  const auto all_pos = make_estimates({0.0, 0.2, 1.0}, {1.0, 1.0, 1.0});
  CHECK(sn_first_step_set(all_pos, ctx, 0.01).count() == 3);

  const auto degenerate = make_estimates({-0.5, 0.0, 0.5}, {0.0, 0.0, 0.0});
  const auto sel = sn_first_step_set(degenerate, ctx, 0.01);
  CHECK(sel.indices == std::vector<int>{1, 2});  // -inf excluded, 0 and +inf kept
}

TEST_CASE("sn_first_step_set enforces the beta range") {
  const SNContext ctx{400, 2, 2, 0.05};
  const auto est = make_estimates({0.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(sn_first_step_set(est, ctx, 0.05 / 3.0), std::invalid_argument);
  CHECK_THROWS_AS(sn_first_step_set(est, ctx, 0.0), std::invalid_argument);
  CHECK_NOTHROW(sn_first_step_set(est, ctx, 0.01));
}

TEST_CASE("sn_critical_value dispatch") {
  const SNContext ctx{400, 1, 1, 0.05};
  const auto est = make_estimates({0.1}, {1.0});
  CHECK(sn_critical_value(SNMethod::one_step, est, ctx) ==
        Catch::Approx(1.6504447850493267).epsilon(1e-10));

  // lasso with the full set retained equals the one-step value exactly
  const SNContext ctx5{400, 5, 5, 0.05};
  const auto est5 = make_estimates({0.1, 0.2, 0.0, 0.3, 0.5}, {1, 1, 1, 1, 1});
  CHECK(sn_critical_value(SNMethod::lasso, est5, ctx5, 0.2) ==
        sn_critical_value(SNMethod::one_step, est5, ctx5));

  // two-step with an empty selection hits the m = 0 branch
  const SNContext ctx2{400, 2, 2, 0.05};
  const auto deep = make_estimates({-10.0, -12.0}, {1.0, 1.0});
  CHECK(sn_critical_value(SNMethod::two_step, deep, ctx2, 0.001) == 0.0);
}

TEST_CASE("quantile comparison reduces to the retained-count ratio") {
  // With k = p, c^{SN}(d1, alpha) <= c^{SN}(d2, alpha - 2 beta) holds exactly
  // when d1 <= d2 * alpha / (alpha - 2 beta), the count comparison that
  // drives the two-step-versus-Lasso power ranking.
  const int n = 400;
  const int p = 60;
  const SNContext ctx{n, p, p, 0.05};
  const double alpha = 0.05;
  for (double beta : {0.0001, 0.001, 0.01}) {
    for (int d1 = 0; d1 <= p; ++d1) {
      for (int d2 = 0; d2 <= p; ++d2) {
        const double lhs = d1 * (alpha - 2.0 * beta);
        const double rhs = d2 * alpha;
        if (std::abs(lhs - rhs) < 1e-9) continue;  // exact ties flip on rounding
        const bool quantile_side =
            sn_quantile(ctx, d1, alpha) <= sn_quantile(ctx, d2, alpha - 2.0 * beta);
        REQUIRE(quantile_side == (lhs < rhs));
      }
    }
  }
}

TEST_CASE("lasso selects inside the SN first step under the sharp premise") {
  // Whenever (4/3) c^{SN,1S}(beta) >= sqrt(n) lambda, J_L is a subset of J_SN.
  RngStream rng(777, StreamPurpose::generic, 0);
  const int n = 400;
  const int p = 12;
  const SNContext ctx{n, p, p, 0.05};
  const double beta = 0.001;
  const double c1s = sn_quantile(ctx, p, beta);
  int enforced = 0;
  while (enforced < 200) {
    std::vector<double> mu(p), sigma(p);
    for (int j = 0; j < p; ++j) {
      mu[j] = 1.2 * (rng.u01() - 0.5);
      sigma[j] = 0.2 + rng.u01();
    }
    // any lambda below (4/3) c / sqrt(n) enforces the premise
    const double lambda_max = 4.0 / 3.0 * c1s / std::sqrt(static_cast<double>(n));
    const double lambda = lambda_max * (0.05 + 0.9 * rng.u01());
    const auto est = make_estimates(mu, sigma);
    const auto lasso = select_lasso(est, p, lambda);
    const auto sn = sn_first_step_set(est, ctx, beta);
    for (int j : lasso.indices) REQUIRE(sn.contains(j));
    ++enforced;
  }
}
