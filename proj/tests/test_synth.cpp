#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sparselabel/synth.hpp"

using namespace sparselabel;

TEST_CASE("catalog regression vectors in closed form") {
  const auto two = DistributionSpec::two_label_linear();
  CHECK(two.eval_eta(0.0).values() == std::vector<double>{0.5, 0.5});
  CHECK(two.eval_eta(1.0).values() == std::vector<double>{1.0, 0.0});

  const auto lb = DistributionSpec::lowerbound_pm(1, 0.0625, 4);
  CHECK(lb.eval_eta(0.3).values() == std::vector<double>{0.75, 0.1875, 0.0, 0.0});
  const auto lbm = DistributionSpec::lowerbound_pm(-1, 0.0625, 2);
  CHECK(lbm.eval_eta(0.9).values() == std::vector<double>{0.75, 0.3125});

  const auto poly = DistributionSpec::topk_poly_margin(2.0, 2, 1);
  const auto eta = poly.eval_eta(0.25);
  CHECK(eta[0] - eta[1] == doctest::Approx(0.5).epsilon(1e-12));  // sqrt(0.25)

  const auto poly5 = DistributionSpec::topk_poly_margin(1.0, 5, 3);
  const auto eta5 = poly5.eval_eta(0.4);
  REQUIRE(eta5.size() == 5);
  CHECK(eta5[0] == 1.0);
  CHECK(eta5[1] == 1.0);
  CHECK(eta5[2] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(eta5[3] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(eta5[4] == 0.0);

  CHECK_THROWS_AS(two.eval_eta(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(two.eval_eta(1.01), std::invalid_argument);
}

TEST_CASE("family constructors validate their parameters") {
  CHECK_THROWS_AS(DistributionSpec::topk_poly_margin(0.0, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::topk_poly_margin(1.0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::topk_poly_margin(1.0, 1, 1), std::invalid_argument);

  CHECK_THROWS_AS(DistributionSpec::lowerbound_pm(0, 0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::lowerbound_pm(1, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::lowerbound_pm(1, 0.2, 2), std::invalid_argument);
  CHECK_NOTHROW(DistributionSpec::lowerbound_pm(-1, 0.125, 2));

  // weights must sum to 1
  CHECK_THROWS_AS(DistributionSpec::beta_staircase({{0.5, 1, 0.9, 0.1}}, 1.0, 3),
                  std::invalid_argument);
  // k high labels must fit the budget ...
  CHECK_THROWS_WITH(DistributionSpec::beta_staircase({{1.0, 2, 0.4, 0.1}}, 1.0, 3),
                    "cell 0: k*(1-eta_high) exceeds beta");
  // ... and the next label must not
  CHECK_THROWS_WITH(DistributionSpec::beta_staircase({{1.0, 1, 1.0, 0.5}}, 1.0, 3),
                    "cell 0: budget does not exclude the first low label");
  CHECK_THROWS_WITH(DistributionSpec::beta_staircase({{1.0, 1, 0.5, 0.5}}, 1.0, 3),
                    "cell 0: eta_high must exceed eta_low");
  CHECK_NOTHROW(DistributionSpec::beta_staircase({{1.0, 1, 0.9, 0.05}}, 1.0, 3));
}

TEST_CASE("piecewise-constant structure and quadrature cells") {
  const auto stair = DistributionSpec::beta_staircase(
      {{0.55, 1, 0.92, 0.02}, {0.30, 2, 0.509, 0.20}, {0.15, 3, 0.6747, 0.25}}, 1.0, 6);
  CHECK(stair.piecewise_constant());
  CHECK(DistributionSpec::lowerbound_pm(1, 0.1, 2).piecewise_constant());
  CHECK_FALSE(DistributionSpec::two_label_linear().piecewise_constant());
  CHECK_FALSE(DistributionSpec::topk_poly_margin(1.0, 2, 1).piecewise_constant());
  CHECK_THROWS_AS(DistributionSpec::two_label_linear().quadrature_cells(), std::invalid_argument);

  const auto cells = stair.quadrature_cells();
  REQUIRE(cells.size() == 3);
  double total = 0.0;
  for (const auto& [w, x] : cells) {
    total += w;
    // the representative point reproduces the cell's eta
    const auto eta = stair.eval_eta(x);
    CHECK(eta[0] >= eta[stair.label_count() - 1]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // cell lookup at interior points
  CHECK(stair.eval_eta(0.0)[0] == doctest::Approx(0.92));
  CHECK(stair.eval_eta(0.56)[0] == doctest::Approx(0.509));
  CHECK(stair.eval_eta(0.999)[2] == doctest::Approx(0.6747));
}

TEST_CASE("sparsity suprema per family") {
  CHECK(DistributionSpec::two_label_linear().sparsity_sup() == doctest::Approx(1.0));
  CHECK(DistributionSpec::topk_poly_margin(1.0, 6, 3).sparsity_sup() == doctest::Approx(3.0));
  CHECK(DistributionSpec::lowerbound_pm(-1, 0.0625, 4).sparsity_sup() ==
        doctest::Approx(1.0625).epsilon(1e-12));
  CHECK(DistributionSpec::lowerbound_pm(1, 0.0625, 4).sparsity_sup() ==
        doctest::Approx(0.9375).epsilon(1e-12));
  const auto stair = DistributionSpec::beta_staircase(
      {{0.55, 1, 0.92, 0.02}, {0.30, 2, 0.509, 0.20}, {0.15, 3, 0.6747, 0.25}}, 1.0, 6);
  CHECK(stair.sparsity_sup() == doctest::Approx(2.7741).epsilon(1e-12));
}

TEST_CASE("sampling is reproducible and matches the marginals") {
  const auto two = DistributionSpec::two_label_linear();
  MonteCarloSpec mc;
  mc.samples = 100000;
  mc.seed = 31;

  const auto run1 = sample_xy(two, mc);
  const auto run2 = sample_xy(two, mc);
  REQUIRE(run1.size() == run2.size());
  bool identical = true;
  for (size_t i = 0; i < run1.size(); ++i) {
    identical = identical && run1[i].x == run2[i].x && run1[i].y == run2[i].y;
  }
  CHECK(identical);

  double y1 = 0.0, y2 = 0.0;
  for (const auto& s : run1) {
    y1 += s.y[0];
    y2 += s.y[1];
  }
  // E[eta1] = 3/4, E[eta2] = 1/4; binomial se ~ 0.0014
  CHECK(std::abs(y1 / mc.samples - 0.75) < 0.0055);
  CHECK(std::abs(y2 / mc.samples - 0.25) < 0.0055);

  const auto lb = DistributionSpec::lowerbound_pm(-1, 0.125, 5);
  for (const auto& s : sample_xy(lb, MonteCarloSpec{20000, 8})) {
    CHECK(s.y[2] == 0);
    CHECK(s.y[3] == 0);
    CHECK(s.y[4] == 0);
  }
}

TEST_CASE("estimator noise is clipped and has the advertised tail") {
  const auto two = DistributionSpec::two_label_linear();
  Rng rng(91);

  // zero noise reproduces eta exactly
  const auto clean = noisy_eta(two, EstimatorSpec(1.0, 0.0), 50, 0.3, rng);
  CHECK(clean.values() == two.eval_eta(0.3).values());

  const EstimatorSpec est(1.0, 0.5);
  const std::int64_t n = 256;
  const double scale = est.noise_scale(n);
  CHECK(scale == doctest::Approx(0.03125).epsilon(1e-12));

  std::int64_t exceed2 = 0, exceed3 = 0, draws = 0;
  const auto eta = two.eval_eta(0.5);
  for (int i = 0; i < 100000; ++i) {
    const auto hat = noisy_eta(two, est, n, 0.5, rng);
    for (int l = 0; l < 2; ++l) {
      CHECK(hat[l] >= 0.0);
      CHECK(hat[l] <= 1.0);
      const double err = std::abs(hat[l] - eta[l]);
      ++draws;
      if (err >= 2.0 * scale) ++exceed2;
      if (err >= 3.0 * scale) ++exceed3;
    }
  }
  // gaussian tails: 2 exp(-m^2/2)
  CHECK(static_cast<double>(exceed2) / draws <= 0.2707);
  CHECK(static_cast<double>(exceed3) / draws <= 0.0222);
  CHECK(static_cast<double>(exceed2) / draws > 0.02);  // not vacuous

  CHECK_THROWS_AS(EstimatorSpec(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(EstimatorSpec(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(est.noise_scale(0), std::invalid_argument);
}

TEST_CASE("bernoulli divergence closed form") {
  CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
  // independently evaluated: p ln(p/q) + (1-p) ln((1-p)/(1-q))
  CHECK(kl_bernoulli(0.1875, 0.3125) == doctest::Approx(0.03995163933269931).epsilon(1e-14));
  CHECK(std::isinf(kl_bernoulli(0.5, 0.0)));
  CHECK(std::isinf(kl_bernoulli(0.5, 1.0)));
  CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
  CHECK(kl_bernoulli(1.0, 1.0) == 0.0);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform01();
    const double q = 0.01 + 0.98 * rng.uniform01();
    CHECK(kl_bernoulli(p, q) >= 0.0);
  }
  CHECK_THROWS_AS(kl_bernoulli(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kl_bernoulli(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("widest indistinguishable separation via the pinsker bound") {
  auto bound = [](std::int64_t n, double u) {
    return std::sqrt(0.5 * static_cast<double>(n) * kl_bernoulli(0.25 - u, 0.25 + u));
  };

  // small samples cannot distinguish even the widest allowed separation
  CHECK(choose_phi_inv(1, 0.5) == 0.125);
  CHECK(choose_phi_inv(2, 0.5) == 0.125);

  // frozen from an independent bisection of the same bound
  CHECK(choose_phi_inv(8, 0.5) == doctest::Approx(0.078434347690122877).epsilon(1e-12));
  CHECK(choose_phi_inv(128, 0.5) == doctest::Approx(0.019288309314152121).epsilon(1e-12));
  CHECK(choose_phi_inv(1024, 0.5) == doctest::Approx(0.0067856788909899796).epsilon(1e-12));

  double prev = 1.0;
  for (std::int64_t n : {1LL, 4LL, 16LL, 64LL, 256LL, 1024LL, 4096LL, 1LL << 20}) {
    const double u = choose_phi_inv(n, 0.5);
    CHECK(u > 0.0);
    CHECK(u <= 0.125);
    CHECK(u <= prev);  // non-increasing in n
    prev = u;
    CHECK(bound(n, u) <= 0.5);
    if (u < 0.125) {
      CHECK(std::abs(bound(n, u) - 0.5) <= 1e-9);  // bisection lands on the target
    }
  }

  CHECK_THROWS_AS(choose_phi_inv(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(choose_phi_inv(10, 0.0), std::invalid_argument);
}
