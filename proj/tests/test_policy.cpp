#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "retsolve/policy.hpp"
#include "test_support.hpp"

using namespace retsolve;
namespace ref = testkit::ref;

namespace {

const SolvedModel& fm() { return testkit::feasible_model(); }

}  // namespace

TEST_CASE("consumption maps") {
  const ModelParams& p = fm().params;
  CHECK(consumption(p, Phase::PreRetirement, 0.25) ==
        doctest::Approx(2.0).epsilon(1e-14));
  // Retired consumption is the excess over the floor, clipped at zero.
  CHECK(consumption(p, Phase::PostRetirement, 0.25) ==
        doctest::Approx(0.8).epsilon(1e-14));
  CHECK(consumption(p, Phase::PostRetirement, 2.0) == 0.0);
  // The corner sits exactly at the kink.
  CHECK(consumption(p, Phase::PostRetirement, p.kink() * (1 + 1e-12)) == 0.0);
}

TEST_CASE("wealth maps at frozen points") {
  CHECK(wealth_of_dual(fm(), Phase::PreRetirement, 0.5) ==
        doctest::Approx(ref::kPreWealthAtHalf).epsilon(1e-11));
  CHECK(wealth_of_dual(fm(), Phase::PostRetirement, 0.5) ==
        doctest::Approx(ref::kPostWealthAtHalf).epsilon(1e-11));
  CHECK(wealth_of_dual(fm(), Phase::PreRetirement, *fm().boundary.z_bar) ==
        doctest::Approx(ref::kWBar).epsilon(1e-11));
}

TEST_CASE("wealth maps are monotone and the portfolio long") {
  for (const Phase phase :
       {Phase::PreRetirement, Phase::PostRetirement}) {
    const double z_lo =
        phase == Phase::PreRetirement ? *fm().boundary.z_bar * 1.0001 : 1e-3;
    double prev = wealth_of_dual(fm(), phase, z_lo);
    for (double z = z_lo * 1.1; z < 50.0; z *= 1.2) {
      const double w = wealth_of_dual(fm(), phase, z);
      CHECK(w < prev);
      CHECK(portfolio(fm(), phase, z) >= 0.0);
      prev = w;
    }
  }
}

TEST_CASE("pre-retirement maps reject states beyond the threshold") {
  const double zb = *fm().boundary.z_bar;
  CHECK_THROWS_AS(wealth_of_dual(fm(), Phase::PreRetirement, zb * 0.9),
                  NumericError);
  // Wealth above the threshold wealth is unreachable while working.
  CHECK_THROWS_AS(dual_of_wealth(fm(), Phase::PreRetirement, ref::kWBar + 1.0),
                  NumericError);
  CHECK(dual_of_wealth(fm(), Phase::PreRetirement, *fm().boundary.w_bar) ==
        doctest::Approx(zb).epsilon(1e-12));
}

TEST_CASE("dual_of_wealth inverts wealth_of_dual") {
  for (const Phase phase :
       {Phase::PreRetirement, Phase::PostRetirement}) {
    for (double z : {0.05, 0.5, 1.0, 4.0}) {
      if (phase == Phase::PreRetirement && z < *fm().boundary.z_bar) continue;
      const double w = wealth_of_dual(fm(), phase, z);
      CHECK(dual_of_wealth(fm(), phase, w) ==
            doctest::Approx(z).epsilon(1e-9));
    }
  }
  // Post-retirement wealth stays above the annuitized income floor
  // -y2/r = 0 here; anything at or below it is unreachable.
  CHECK_THROWS_AS(dual_of_wealth(fm(), Phase::PostRetirement, -60.0),
                  NumericError);
  CHECK_THROWS_AS(dual_of_wealth(fm(), Phase::PostRetirement, 0.0),
                  NumericError);
}

TEST_CASE("policy table layout") {
  GridSpec grid;
  grid.n = 50;
  const auto rows = policy_table(fm(), grid);
  REQUIRE(!rows.empty());

  // First row is the threshold; it carries the threshold wealth.
  CHECK(rows[0].is_threshold);
  CHECK(rows[0].phase == Phase::PreRetirement);
  CHECK(rows[0].z == doctest::Approx(ref::kZBar).epsilon(1e-12));
  CHECK(rows[0].wealth == doctest::Approx(ref::kWBar).epsilon(1e-11));

  size_t pre = 0, post = 0;
  for (const auto& row : rows) {
    if (row.phase == Phase::PreRetirement) {
      ++pre;
      CHECK(row.z >= *fm().boundary.z_bar * (1 - 1e-12));
    } else {
      ++post;
    }
    CHECK(std::isfinite(row.wealth));
    CHECK(row.consumption >= 0.0);
  }
  CHECK(post == 50);  // full grid
  CHECK(pre >= 2);    // threshold plus grid points above z_bar
  CHECK(pre + post == rows.size());

  // Grid validation.
  GridSpec bad;
  bad.z_min = -1.0;
  CHECK_THROWS_AS(policy_table(fm(), bad), ValidationError);
}

TEST_CASE("policy table without a boundary has only working rows") {
  const auto rows = policy_table(testkit::delay_forever_model(), GridSpec{});
  REQUIRE(!rows.empty());
  CHECK(std::all_of(rows.begin(), rows.end(), [](const PolicyPoint& r) {
    return r.phase == Phase::PreRetirement && !r.is_threshold;
  }));
}
