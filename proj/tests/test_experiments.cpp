#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sparselabel/experiments.hpp"

using namespace sparselabel;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.dist = DistributionSpec::two_label_linear();
  cfg.est = EstimatorSpec(1.0, 0.5);
  cfg.rule = RuleSpec::TopK(1);
  cfg.n_grid = {64, 128, 256};
  cfg.replicates = 4;
  cfg.mc.samples = 2000;
  cfg.master_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("experiment validation rejects malformed configs") {
  auto cfg = small_config();
  validate_experiment(cfg);  // baseline passes

  auto bad = cfg;
  bad.n_grid.clear();
  CHECK_THROWS_WITH_AS(validate_experiment(bad), "n_grid must not be empty",
                       std::invalid_argument);

  bad = cfg;
  bad.n_grid = {64, 64};
  CHECK_THROWS_WITH_AS(validate_experiment(bad), "n_grid must be strictly increasing",
                       std::invalid_argument);

  bad = cfg;
  bad.n_grid = {0, 64};
  CHECK_THROWS_WITH_AS(validate_experiment(bad), "n_grid entries must be >= 1",
                       std::invalid_argument);

  bad = cfg;
  bad.replicates = 0;
  CHECK_THROWS_WITH_AS(validate_experiment(bad), "replicates must be >= 1",
                       std::invalid_argument);

  bad = cfg;
  bad.rule = RuleSpec::TopK(5);  // exceeds the two labels
  CHECK_THROWS_AS(validate_experiment(bad), std::invalid_argument);

  bad = cfg;
  bad.mc.samples = 0;
  CHECK_THROWS_AS(validate_experiment(bad), std::invalid_argument);
}

TEST_CASE("noiseless estimator reproduces the oracle exactly") {
  auto cfg = small_config();
  cfg.est = EstimatorSpec(1.0, 0.0);
  const auto results = run_rate_sweep(cfg, 1);
  REQUIRE(results.size() == cfg.n_grid.size() * static_cast<size_t>(cfg.replicates));
  for (const auto& row : results) {
    CHECK(row.excess_signed == 0.0);
    CHECK(row.excess_abs == 0.0);
    CHECK(row.oracle_risk > 0.0);
  }
}

TEST_CASE("sweep output is ordered and independent of worker count") {
  const auto cfg = small_config();
  const auto seq = run_rate_sweep(cfg, 1);
  const auto par = run_rate_sweep(cfg, 3);
  REQUIRE(seq.size() == par.size());
  CHECK(seq == par);
  CHECK(rate_results_csv(seq) == rate_results_csv(par));

  size_t i = 0;
  for (std::int64_t n : cfg.n_grid) {
    for (int r = 0; r < cfg.replicates; ++r, ++i) {
      CHECK(seq[i].n == n);
      CHECK(seq[i].replicate == r);
      CHECK(seq[i].excess_abs == std::abs(seq[i].excess_signed));
    }
  }
}

TEST_CASE("per-n means follow the grid order") {
  auto cfg = small_config();
  cfg.n_grid = {10, 100};
  cfg.replicates = 2;
  std::vector<RateResult> rows{
      {10, 0, 0.4, 0.4, 0.1}, {10, 1, -0.2, 0.2, 0.1}, {100, 0, 0.1, 0.1, 0.1},
      {100, 1, 0.3, 0.3, 0.1},
  };
  const auto means = mean_abs_excess_by_n(cfg, rows);
  REQUIRE(means.size() == 2);
  CHECK(means[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(means[1] == doctest::Approx(0.2).epsilon(1e-15));

  rows.push_back({999, 0, 0.0, 0.0, 0.0});
  CHECK_THROWS_WITH_AS(mean_abs_excess_by_n(cfg, rows), "result n not in the config grid",
                       std::invalid_argument);

  rows.pop_back();
  rows.erase(rows.begin(), rows.begin() + 2);  // nothing left for n = 10
  CHECK_THROWS_WITH_AS(mean_abs_excess_by_n(cfg, rows), "grid point without results",
                       std::invalid_argument);
}

TEST_CASE("slope fit recovers constructed decay rates") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {100, 200, 400, 800};
  cfg.replicates = 1;

  auto make_rows = [&](double exponent) {
    std::vector<RateResult> rows;
    for (std::int64_t n : cfg.n_grid) {
      const double e = 3.0 * std::pow(static_cast<double>(n), exponent);
      rows.push_back({n, 0, e, e, 0.5});
    }
    return rows;
  };

  {
    const auto fit = fit_rate_slope(cfg, make_rows(-1.0));
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(fit.points_used == 4);
    CHECK(fit.stderr_slope < 1e-9);
  }
  {
    const auto fit = fit_rate_slope(cfg, make_rows(-1.5));
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-9));
  }
  {
    std::vector<RateResult> zeros;
    for (std::int64_t n : cfg.n_grid) zeros.push_back({n, 0, 0.0, 0.0, 0.5});
    CHECK_THROWS_WITH_AS(fit_rate_slope(cfg, zeros),
                         "rate fit needs at least 3 grid points with positive mean excess",
                         std::runtime_error);
  }
}

TEST_CASE("rate csv uses the pinned header and one row per result") {
  const std::vector<RateResult> rows{{64, 0, 0.125, 0.125, 0.25}};
  const std::string csv = rate_results_csv(rows);
  CHECK(csv == "n,replicate,excess_signed,excess_abs,oracle_risk\n64,0,0.125,0.125,0.25\n");
}

TEST_CASE("budget-rule demo keeps the scaled excess bounded away from zero") {
  const std::vector<std::int64_t> grid{128, 256};
  const auto report = run_inconsistency_demo(grid, 400, 2, 99, 200, 1);

  REQUIRE(report.rows.size() == 2);
  CHECK(report.labels == 2);
  for (size_t i = 0; i < grid.size(); ++i) {
    const auto& row = report.rows[i];
    CHECK(row.n == grid[i]);
    CHECK(row.phi_inv == choose_phi_inv(row.n, 0.5));
    CHECK(row.max_scaled ==
          doctest::Approx(2.0 * std::max(row.excess_plus, row.excess_minus)).epsilon(1e-15));
    CHECK(row.max_scaled >= 0.05);
  }

  CHECK(report.floor_check.profiles == 200);
  CHECK(report.floor_check.floor == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK(report.floor_check.min_sum >= report.floor_check.floor - 1e-12);
  CHECK(report.floor_check.holds);

  const std::string csv = inconsistency_csv(report);
  CHECK(csv.rfind("n,phi_inv,excess_plus,excess_minus,max_scaled\n", 0) == 0);

  CHECK_THROWS_AS(run_inconsistency_demo(grid, 400, 1, 99, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_inconsistency_demo(grid, 0, 2, 99, 10, 1), std::invalid_argument);
  const std::vector<std::int64_t> empty;
  CHECK_THROWS_AS(run_inconsistency_demo(empty, 400, 2, 99, 10, 1), std::invalid_argument);
}

TEST_CASE("profile excess on the +/- pair matches hand calculations") {
  const double phi = 0.0625;
  {
    const auto [ep, em] = profile_excess_pair(0.0, 0.0, phi, 2);
    CHECK(ep == doctest::Approx((0.25 - phi) / 2.0).epsilon(1e-15));
    CHECK(em == 0.0);
  }
  {
    const auto [ep, em] = profile_excess_pair(0.0, 1.0, phi, 2);
    CHECK(ep == 0.0);
    CHECK(em == doctest::Approx((0.25 + phi) / 2.0).epsilon(1e-15));
  }
  {
    const auto [ep, em] = profile_excess_pair(1.0, 0.0, phi, 4);
    CHECK(ep == doctest::Approx((0.5 + phi) / 4.0).epsilon(1e-15));
    CHECK(em == doctest::Approx(0.75 / 4.0).epsilon(1e-15));
  }

  // every profile pays at least 1/(8L) across the two signs
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const double a = rng.uniform01();
    const double b = rng.uniform01();
    const double u = 0.125 * (0.5 + 0.5 * rng.uniform01());
    const int L = 2 + (t % 4);
    const auto [ep, em] = profile_excess_pair(a, b, u, L);
    CHECK(ep + em >= 1.0 / (8.0 * L) - 1e-12);
  }

  CHECK_THROWS_AS(profile_excess_pair(-0.1, 0.5, phi, 2), std::invalid_argument);
  CHECK_THROWS_AS(profile_excess_pair(0.5, 1.5, phi, 2), std::invalid_argument);
  CHECK_THROWS_AS(profile_excess_pair(0.5, 0.5, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(profile_excess_pair(0.5, 0.5, 0.2, 2), std::invalid_argument);
  CHECK_THROWS_AS(profile_excess_pair(0.5, 0.5, phi, 1), std::invalid_argument);
}
