#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "sparselabel/core.hpp"

namespace sparselabel {

enum class RuleKind { top_k, beta_budget, mixed, full };

// A constraint family together with the parameters of its closed-form
// classifier:
//   top_k       exactly k labels on, the k largest probabilities
//   beta_budget largest prefix of the ranking whose expected false-positive
//               cost sum(1 - v) stays within the budget beta
//   mixed       beta_budget prefix additionally capped at k labels
//   full        every label on
struct RuleSpec {
  RuleKind kind = RuleKind::full;
  int k = 0;
  double beta = 0.0;

  static RuleSpec TopK(int k);
  static RuleSpec BetaBudget(double beta);
  static RuleSpec Mixed(double beta, int k);
  static RuleSpec Full();

  // k <= L checks can only happen once the label count is known
  void validate_for(int label_count) const;

  std::string describe() const;
};

LabelVector top_k_classify(const ProbVector& v, int k);

// Largest m such that sum over the m highest-ranked labels of (1 - v) stays
// <= beta; 0 when even the first label exceeds the budget. The prefix sums
// are nondecreasing, so the scan stops at the first overshoot.
int beta_threshold(const ProbVector& v, double beta);

LabelVector beta_classify(const ProbVector& v, double beta);
LabelVector mixed_classify(const ProbVector& v, double beta, int k);
LabelVector apply_rule(const ProbVector& v, const RuleSpec& rule);

// Unchecked hot-path variant over a precomputed descending ranking.
int beta_threshold_ranked(std::span<const double> v, std::span<const std::int32_t> order,
                          double beta);

struct OracleResult {
  LabelVector labels;
  double fn_sum;  // sum of v over switched-off labels, the minimized objective
};

// Exhaustive minimizer over all feasible decision vectors (L <= 20). Ties on
// the objective resolve to the lexicographically smallest vector. Testing
// reference for the closed-form rules.
OracleResult brute_force_oracle(const ProbVector& v, const RuleSpec& rule);

}  // namespace sparselabel
