#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparselabel/rules.hpp"
#include "sparselabel/synth.hpp"

namespace sparselabel {

// A rate experiment: for each training size n and replicate, the plug-in rule
// (estimation noise at scale c0 * n^(-gamma/2)) is compared against the
// family oracle by paired Monte Carlo over the feature distribution. No
// training sample is ever materialized; the estimator accuracy model stands
// in for fitting.
struct ExperimentConfig {
  DistributionSpec dist = DistributionSpec::two_label_linear();
  EstimatorSpec est;
  RuleSpec rule;
  std::vector<std::int64_t> n_grid;  // strictly increasing training sizes
  int replicates = 200;
  MonteCarloSpec mc;  // samples per replicate; streams derive from master_seed
  std::uint64_t master_seed = 1;
};

void validate_experiment(const ExperimentConfig& cfg);

struct RateResult {
  std::int64_t n = 0;
  int replicate = 0;
  double excess_signed = 0.0;
  double excess_abs = 0.0;
  double oracle_risk = 0.0;

  bool operator==(const RateResult&) const = default;
};

// Results in (n, replicate) order. Each (n, replicate) task owns the random
// stream derived from (master_seed, n, replicate), so the output is identical
// for every worker count.
std::vector<RateResult> run_rate_sweep(const ExperimentConfig& cfg, int threads = 0);

// Per-n means of the absolute excess, in grid order. Exposed for monotonicity
// checks and the slope fit.
std::vector<double> mean_abs_excess_by_n(const ExperimentConfig& cfg,
                                         const std::vector<RateResult>& results);

struct RateSlope {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points_used = 0;
};

// Least squares of log(mean absolute excess) on log n. Grid points whose mean
// excess is not strictly positive are dropped; fewer than 3 usable points is
// an error (std::runtime_error), since no rate can be read off.
RateSlope fit_rate_slope(const ExperimentConfig& cfg, const std::vector<RateResult>& results);

std::string rate_results_csv(const std::vector<RateResult>& results);

// Budget-rule inconsistency demo on the +/- constant pair. For each n the
// separation phi_inv is the widest that n samples cannot distinguish (total
// variation target 1/2), while the plug-in noise scale n^(-1/2) dominates it;
// eta is constant in x, so each replicate's risk is evaluated exactly and
// only the estimation noise is sampled.
struct InconsistencyRow {
  std::int64_t n = 0;
  double phi_inv = 0.0;
  double excess_plus = 0.0;   // E |R(plug-in) - R(oracle)| under rho = +1
  double excess_minus = 0.0;  // same under rho = -1
  double max_scaled = 0.0;    // L * max of the two
};

// Exact absolute excess risks of a decision profile on the +/- pair, where
// a and b are the probabilities of the events {first label off} and {second
// label off}. Their sum is bounded below by 1/(8L) for every profile.
std::pair<double, double> profile_excess_pair(double a, double b, double phi_inv, int labels);

// Closed-form floor over random decision profiles (a, b) = measures of the
// events {first label off} and {second label off}: the two excess risks
// always sum to at least 1/(8L).
struct FloorCheck {
  int profiles = 0;
  double min_sum = 0.0;    // smallest observed E_plus + E_minus
  double floor = 0.0;      // 1/(8L)
  bool holds = false;      // min_sum >= floor - 1e-12
};

struct InconsistencyReport {
  int labels = 0;
  std::vector<InconsistencyRow> rows;
  FloorCheck floor_check;
};

InconsistencyReport run_inconsistency_demo(std::span<const std::int64_t> n_grid,
                                           std::int64_t replicates, int labels,
                                           std::uint64_t seed, int floor_profiles = 1000,
                                           int threads = 0);

std::string inconsistency_csv(const InconsistencyReport& report);

}  // namespace sparselabel
