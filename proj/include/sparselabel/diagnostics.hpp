#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparselabel/synth.hpp"

namespace sparselabel {

// Log-log power fit of an empirical tail P(statistic <= delta) over a delta
// grid. Only grid points whose empirical probability reaches 10/samples enter
// the fit; with fewer than two such points the tail is flagged degenerate
// (typically: the statistic is bounded away from zero, so every tested tail
// probability vanishes).
struct TailFitReport {
  std::vector<double> delta_grid;
  std::vector<double> empirical_probs;
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  bool degenerate = true;
};

// Sensible default for tail estimation: geometric grid on [0.02, 0.9].
std::vector<double> default_delta_grid();

// Tail of the gap between the k-th and (k+1)-th ranked probabilities,
// restricted to strictly positive gaps: P(0 < gap_k <= delta).
TailFitReport check_topk_margin(const DistributionSpec& dist, int k,
                                std::span<const double> delta_grid, const MonteCarloSpec& mc);

// Per-level margin tails conditioned on the budget-optimal count:
// P(gap_k <= delta, K(X) = k) for each level k = 1..L, where K(X) is the
// budget rule's threshold at X and gap_L treats the (L+1)-th value as 0.
struct LocalMarginReport {
  std::vector<double> delta_grid;
  std::vector<TailFitReport> per_level;  // index k-1 holds level k
  std::vector<double> level_probs;       // empirical P(K(X) = k), k = 1..L
  double prob_level_zero = 0.0;
  double min_exponent = 0.0;  // smallest fitted exponent over non-degenerate levels
  bool all_degenerate = true;
};

LocalMarginReport check_local_margin(const DistributionSpec& dist, double beta,
                                     std::span<const double> delta_grid,
                                     const MonteCarloSpec& mc);

// Empirical essential supremum of sum_l eta^l(X).
double check_sparsity(const DistributionSpec& dist, const MonteCarloSpec& mc);

// Tail of the centered budget statistic, per level k and window length l:
//   stat(k,l) = (1/l) | sum_{j=k-l+1..k} (1 - eta[s_j]) - beta |
// restricted to K(X) = k. The check searches for an exponent a > 0 such that
// every empirical tail point obeys P <= (beta*delta)^a * 2^-(k-l); the
// feasible exponents form an interval, so infeasibility is certified by the
// binding points.
struct GlobalMarginPoint {
  int k = 0;
  int l = 0;
  double delta = 0.0;
  double prob = 0.0;
};

struct GlobalMarginCell {
  int k = 0;
  int l = 0;
  std::vector<double> probs;  // aligned with delta_grid
};

struct GlobalMarginReport {
  std::vector<double> delta_grid;
  std::vector<GlobalMarginCell> cells;
  std::vector<double> level_probs;  // empirical P(K(X) = k), k = 1..L
  double prob_level_zero = 0.0;
  bool feasible = false;
  double alpha2_hat = 0.0;  // largest feasible exponent, capped at 32
  std::vector<GlobalMarginPoint> violations;
};

GlobalMarginReport check_global_margin(const DistributionSpec& dist, double beta,
                                       std::span<const double> delta_grid,
                                       const MonteCarloSpec& mc);

// Pointwise check that the plug-in budget rule lands in the enlarged budget
// family: fp_sum(f_hat, eta) <= beta + sum_l |eta^l - eta_hat^l| for every
// sampled point. The slack tolerance absorbs summation-order rounding only.
struct EmbeddingReport {
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double max_violation = 0.0;  // max over samples of lhs - rhs, <= tolerance when clean
  double tolerance = 0.0;
  bool has_witness = false;
  double witness_x = 0.0;
  std::vector<double> witness_eta;
  std::vector<double> witness_eta_hat;
};

EmbeddingReport check_embedding(const DistributionSpec& dist, const EstimatorSpec& est,
                                double beta, std::int64_t n_train, const MonteCarloSpec& mc,
                                double tolerance = 1e-9);

// Pointwise check that small estimation error preserves top sets: whenever
// 2 * max_l |eta^l - eta_hat^l| < gap_k strictly, the top-k labels under
// eta_hat coincide with the top-k labels under eta as sets. Samples that
// qualify for no level are skipped, not failures.
struct PartialOrderReport {
  std::int64_t samples = 0;
  std::int64_t qualifying = 0;  // (sample, level) pairs meeting the premise
  std::int64_t violations = 0;
  bool has_witness = false;
  double witness_x = 0.0;
  int witness_level = 0;
};

PartialOrderReport check_partial_order(const DistributionSpec& dist, const EstimatorSpec& est,
                                       std::int64_t n_train, const MonteCarloSpec& mc);

}  // namespace sparselabel
