#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sparselabel/diagnostics.hpp"

using namespace sparselabel;

namespace {

DistributionSpec staircase() {
  return DistributionSpec::beta_staircase(
      {{0.55, 1, 0.92, 0.02}, {0.30, 2, 0.509, 0.20}, {0.15, 3, 0.6747, 0.25}}, 1.0, 6);
}

MonteCarloSpec mc_100k(std::uint64_t seed) {
  MonteCarloSpec mc;
  mc.samples = 100000;
  mc.seed = seed;
  return mc;
}

}  // namespace

TEST_CASE("default delta grid is geometric on [0.02, 0.9]") {
  const auto grid = default_delta_grid();
  REQUIRE(grid.size() == 12);
  CHECK(grid.front() == doctest::Approx(0.02));
  CHECK(grid.back() == doctest::Approx(0.9));
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("top-gap tail fits recover constructed exponents") {
  const auto grid = default_delta_grid();
  {
    const auto fit = check_topk_margin(DistributionSpec::topk_poly_margin(1.0, 2, 1), 1, grid,
                                       mc_100k(11));
    REQUIRE_FALSE(fit.degenerate);
    CHECK(std::abs(fit.fitted_exponent - 1.0) <= 0.1);
    CHECK(fit.r_squared > 0.99);
    for (size_t i = 1; i < fit.empirical_probs.size(); ++i) {
      CHECK(fit.empirical_probs[i] >= fit.empirical_probs[i - 1]);
    }
  }
  {
    const auto fit = check_topk_margin(DistributionSpec::topk_poly_margin(2.0, 3, 2), 2, grid,
                                       mc_100k(12));
    REQUIRE_FALSE(fit.degenerate);
    CHECK(std::abs(fit.fitted_exponent - 2.0) <= 0.2);
  }
  {
    // gap bounded below 0.85: every tested tail is empty
    const auto single = DistributionSpec::beta_staircase({{1.0, 1, 0.9, 0.05}}, 1.0, 3);
    const std::vector<double> low{0.05, 0.1, 0.2, 0.4};
    const auto fit = check_topk_margin(single, 1, low, mc_100k(13));
    CHECK(fit.degenerate);
    for (double p : fit.empirical_probs) CHECK(p == 0.0);
  }
  CHECK_THROWS_AS(check_topk_margin(DistributionSpec::two_label_linear(), 2, grid, mc_100k(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_topk_margin(DistributionSpec::two_label_linear(), 0, grid, mc_100k(1)),
                  std::invalid_argument);
}

TEST_CASE("per-level margins on the staircase match the construction") {
  const auto dist = staircase();
  const auto grid = default_delta_grid();
  const auto rep = check_local_margin(dist, 1.0, grid, mc_100k(21));

  REQUIRE(rep.per_level.size() == 6);
  REQUIRE(rep.level_probs.size() == 6);
  CHECK(rep.prob_level_zero == 0.0);

  // the budget threshold lands on each cell's k with the cell's weight
  const double se = 4.0 * std::sqrt(0.25 / 100000.0);
  CHECK(std::abs(rep.level_probs[0] - 0.55) < se);
  CHECK(std::abs(rep.level_probs[1] - 0.30) < se);
  CHECK(std::abs(rep.level_probs[2] - 0.15) < se);
  CHECK(rep.level_probs[3] == 0.0);

  // gaps sit at 0.90 / 0.309 / 0.4247, far above the smallest delta
  for (const auto& lvl : rep.per_level) {
    if (!lvl.empirical_probs.empty()) CHECK(lvl.empirical_probs.front() == 0.0);
  }
}

TEST_CASE("at delta >= 1 the level tail saturates at the level mass") {
  const auto dist = staircase();
  const std::vector<double> grid{0.5, 1.0};
  const auto rep = check_local_margin(dist, 1.0, grid, mc_100k(22));
  for (int k = 0; k < 6; ++k) {
    CHECK(rep.per_level[static_cast<size_t>(k)].empirical_probs.back() ==
          doctest::Approx(rep.level_probs[static_cast<size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("constant-pair distribution concentrates on one level") {
  const auto lbm = DistributionSpec::lowerbound_pm(-1, 0.0625, 2);
  const auto rep = check_local_margin(lbm, 1.0, default_delta_grid(), mc_100k(23));
  CHECK(rep.level_probs[0] == 0.0);
  CHECK(rep.level_probs[1] == 1.0);
  CHECK(rep.prob_level_zero == 0.0);
  for (const auto& lvl : rep.per_level) {
    if (!lvl.empirical_probs.empty()) CHECK(lvl.empirical_probs.front() == 0.0);
  }
}

TEST_CASE("empirical relevance supremum equals the analytic one") {
  CHECK(check_sparsity(DistributionSpec::two_label_linear(), mc_100k(31)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_sparsity(staircase(), mc_100k(32)) == doctest::Approx(2.7741).epsilon(1e-12));
  CHECK(check_sparsity(DistributionSpec::lowerbound_pm(-1, 0.0625, 3), mc_100k(33)) ==
        doctest::Approx(1.0625).epsilon(1e-12));
}

TEST_CASE("budget-window tails: staircase admits an exponent, constant pair does not") {
  const auto grid = default_delta_grid();

  const auto good = check_global_margin(staircase(), 1.0, grid, mc_100k(41));
  CHECK(good.feasible);
  CHECK(good.violations.empty());
  // binding cell: weight 0.30 at the smallest delta, so the cap is
  // ln(0.30)/ln(0.02) ~ 0.308
  CHECK(good.alpha2_hat > 0.25);
  CHECK(good.alpha2_hat < 0.40);
  double mass = good.prob_level_zero;
  for (double p : good.level_probs) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  for (int rho : {+1, -1}) {
    const auto bad = check_global_margin(DistributionSpec::lowerbound_pm(rho, 0.0625, 2), 1.0,
                                         grid, mc_100k(42));
    CHECK_FALSE(bad.feasible);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().prob > 0.0);
  }
}

TEST_CASE("plug-in budget decisions stay inside the enlarged budget") {
  const EstimatorSpec est(1.0, 1.0);
  const auto mc = mc_100k(51);
  for (int which = 0; which < 3; ++which) {
    const DistributionSpec dist = which == 0   ? DistributionSpec::two_label_linear()
                                  : which == 1 ? staircase()
                                               : DistributionSpec::lowerbound_pm(-1, 0.0625, 2);
    const auto rep = check_embedding(dist, est, 1.0, 64, mc);
    CHECK(rep.samples == mc.samples);
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.has_witness);
    CHECK(rep.max_violation <= rep.tolerance);
  }

  // noiseless: the plug-in set is the true set, fp stays within the raw budget
  const auto clean = check_embedding(staircase(), EstimatorSpec(1.0, 0.0), 1.0, 64, mc_100k(52));
  CHECK(clean.violations == 0);
  CHECK(clean.max_violation <= 0.0);
}

TEST_CASE("small estimation error preserves top sets on qualifying events") {
  const EstimatorSpec est(1.0, 1.0);
  for (int which = 0; which < 3; ++which) {
    const DistributionSpec dist = which == 0
                                      ? DistributionSpec::two_label_linear()
                                      : which == 1 ? staircase()
                                                   : DistributionSpec::topk_poly_margin(1.0, 4, 2);
    const auto rep = check_partial_order(dist, est, 64, mc_100k(61));
    CHECK(rep.samples == 100000);
    CHECK(rep.qualifying > 0);
    CHECK(rep.violations == 0);
    CHECK_FALSE(rep.has_witness);
  }
}
