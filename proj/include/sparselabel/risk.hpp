#pragma once

#include <cstdint>
#include <functional>

#include "sparselabel/core.hpp"
#include "sparselabel/rng.hpp"
#include "sparselabel/rules.hpp"
#include "sparselabel/synth.hpp"

namespace sparselabel {

// Expected number of missed positives given the decision f at a point with
// regression vector eta: sum of eta over switched-off labels. Not normalized.
double conditional_fn_sum(const LabelVector& f, const ProbVector& eta);

// Expected number of spurious positives: sum of (1 - eta) over switched-on
// labels.
double conditional_fp_sum(const LabelVector& f, const ProbVector& eta);

// A decision rule as a function of the feature. Stochastic rules (plug-in
// rules with estimation noise) must draw exclusively from the provided
// stream; deterministic rules ignore it and may be integrated exactly.
struct Classifier {
  std::function<LabelVector(double x, Rng& rng)> decide;
  bool stochastic = false;
};

// The closed-form optimal rule of the family applied to the true eta.
Classifier make_oracle_classifier(const DistributionSpec& dist, const RuleSpec& rule);

// The same formula applied to a fresh noisy estimate of eta at every call.
Classifier make_plugin_classifier(const DistributionSpec& dist, const RuleSpec& rule,
                                  const EstimatorSpec& est, std::int64_t n_train);

Classifier make_constant_classifier(LabelVector f);

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
};

// Population false-negative risk (1/L) E[conditional_fn_sum(rule(X), eta(X))].
// The conditional sums integrate the label randomness analytically, so only
// the feature (and any rule noise) is sampled. Piecewise-constant families
// with a deterministic rule are integrated exactly by cell weights.
RiskEstimate population_fn_risk(const Classifier& rule, const DistributionSpec& dist,
                                const MonteCarloSpec& mc, int threads = 1);

struct ExcessEstimate {
  double excess_signed = 0.0;  // rule risk minus oracle risk
  double excess_abs = 0.0;
  double rule_risk = 0.0;
  double oracle_risk = 0.0;
  double std_error = 0.0;  // of the signed difference
  bool exact = false;
};

// Excess risk of `rule` over the closed-form oracle of `family` on the same
// distribution. Monte Carlo estimates pair both rules on the same feature
// draws, which cancels most of the sampling variance of the difference.
ExcessEstimate excess_risk(const Classifier& rule, const RuleSpec& family,
                           const DistributionSpec& dist, const MonteCarloSpec& mc,
                           int threads = 1);

struct PairwiseBoundEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the ranked-pair disagreement functional
//   (1/L) E sum_{l <= K < j} (eta[s_l] - eta[s_j]) 1{f[s_l] = 0, f[s_j] = 1}
// where s is the descending ranking of the true eta at X. Dominates the
// signed excess of any rule switching on at most K labels.
PairwiseBoundEstimate pairwise_excess_bound(const Classifier& rule, const DistributionSpec& dist,
                                            const MonteCarloSpec& mc, int top_k, int threads = 1);

}  // namespace sparselabel
