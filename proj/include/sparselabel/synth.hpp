#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sparselabel/core.hpp"
#include "sparselabel/rng.hpp"

namespace sparselabel {

enum class DistFamily { two_label_linear, topk_poly_margin, beta_staircase, lowerbound_pm };

struct StaircaseCell {
  double weight;    // probability mass of the cell under the uniform feature
  int k;            // number of high labels; also the budget-optimal count
  double eta_high;  // probability of the first k labels
  double eta_low;   // probability of the remaining labels
};

// Synthetic (X, Y) law over X ~ uniform[0,1] with independent per-label
// Bernoulli responses. Four families:
//
//   two_label_linear   L=2, eta = ((1+x)/2, (1-x)/2); the gap between the two
//                      labels is exactly x
//   topk_poly_margin   labels above the k-th sit at 1, below the (k+1)-th at
//                      0, and the k-th/(k+1)-th straddle 1/2 with gap
//                      x^(1/alpha), so P(gap <= d) = d^alpha
//   beta_staircase     piecewise constant over cells; each cell is validated
//                      so the budget rule switches on exactly its k high
//                      labels: k(1-eta_high) <= beta < k(1-eta_high)+(1-eta_low)
//   lowerbound_pm      constant eta = (3/4, 1/4 - rho*phi_inv, 0, ..., 0)
//                      with rho = +/-1; the two signs are the indistinguish-
//                      able pair driving the budget-rule inconsistency demo
class DistributionSpec {
 public:
  static DistributionSpec two_label_linear();
  static DistributionSpec topk_poly_margin(double alpha, int labels, int k);
  static DistributionSpec beta_staircase(std::vector<StaircaseCell> cells, double beta, int labels);
  static DistributionSpec lowerbound_pm(int rho, double phi_inv, int labels);

  DistFamily family() const { return family_; }
  int label_count() const { return labels_; }

  ProbVector eval_eta(double x) const;
  // unchecked except for the domain test; out must have label_count() slots
  void eval_eta_into(double x, std::span<double> out) const;

  // true when eta is constant over finitely many feature cells, enabling
  // exact integration of per-feature quantities
  bool piecewise_constant() const;
  // (probability mass, representative feature) per cell; only for
  // piecewise-constant families
  std::vector<std::pair<double, double>> quadrature_cells() const;

  // essential supremum of sum_l eta^l(X), exact per family
  double sparsity_sup() const;

  // family parameters; only meaningful for the owning family
  double alpha() const { return alpha_; }
  int margin_k() const { return k_; }
  const std::vector<StaircaseCell>& cells() const { return cells_; }
  double staircase_beta() const { return beta_; }
  int rho() const { return rho_; }
  double phi_inv() const { return phi_inv_; }

 private:
  DistributionSpec() = default;

  DistFamily family_ = DistFamily::two_label_linear;
  int labels_ = 2;
  double alpha_ = 1.0;
  int k_ = 1;
  std::vector<StaircaseCell> cells_;
  double beta_ = 0.0;
  int rho_ = 1;
  double phi_inv_ = 0.0;
};

// Accuracy model for the estimated probability vector: independent Gaussian
// noise of scale c0 * n^(-gamma/2) per label, clipped back into [0,1]. c0 = 0
// recovers the exact vector.
struct EstimatorSpec {
  double gamma = 1.0;
  double c0 = 0.5;

  EstimatorSpec() = default;
  EstimatorSpec(double gamma, double c0);

  double noise_scale(std::int64_t n_train) const;
};

struct MonteCarloSpec {
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
};

void validate_monte_carlo(const MonteCarloSpec& mc);

struct Sample {
  double x;
  LabelVector y;
};

// Independent draws of (X, Y); byte-for-byte reproducible for a fixed seed.
std::vector<Sample> sample_xy(const DistributionSpec& dist, const MonteCarloSpec& mc);

// One realization of the estimated probability vector at x.
ProbVector noisy_eta(const DistributionSpec& dist, const EstimatorSpec& est, std::int64_t n_train,
                     double x, Rng& rng);
// hot-path variant writing into eta_hat (eta may alias nothing); scale is
// est.noise_scale(n) precomputed by the caller
void noisy_eta_into(std::span<const double> eta, double scale, Rng& rng, std::span<double> eta_hat);

// KL divergence between Bernoulli(p) and Bernoulli(q) with the 0 log 0 = 0
// convention; +infinity when q is degenerate and p disagrees.
double kl_bernoulli(double p, double q);

// Largest u <= 1/8 such that sqrt(n * kl_bernoulli(1/4 - u, 1/4 + u) / 2)
// stays <= tv_target, found by bisection. This is the widest parameter
// separation that a sample of size n cannot reliably distinguish.
double choose_phi_inv(std::int64_t n, double tv_target);

}  // namespace sparselabel
