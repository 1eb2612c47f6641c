#pragma once

#include <string>

#include "json.hpp"
#include "sparselabel/diagnostics.hpp"
#include "sparselabel/experiments.hpp"
#include "sparselabel/risk.hpp"

namespace sparselabel {

using json = nlohmann::json;

// Distribution documents carry a "family" discriminator plus the parameters
// of that family; see dist_from_json for the accepted shapes.
json dist_to_json(const DistributionSpec& dist);
DistributionSpec dist_from_json(const json& j);

json estimator_to_json(const EstimatorSpec& est);
EstimatorSpec estimator_from_json(const json& j);

json rule_to_json(const RuleSpec& rule);
RuleSpec rule_from_json(const json& j);

json mc_to_json(const MonteCarloSpec& mc);
MonteCarloSpec mc_from_json(const json& j);

json experiment_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_from_json(const json& j);

// Reads and validates an ExperimentConfig document. Any failure (missing
// file, malformed JSON, invalid values) throws std::runtime_error with a
// message that names the path.
ExperimentConfig load_experiment_config(const std::string& path);

json risk_to_json(const RiskEstimate& est);
json excess_to_json(const ExcessEstimate& est);
json pairwise_bound_to_json(const PairwiseBoundEstimate& est);
json tail_fit_to_json(const TailFitReport& report);
json local_margin_to_json(const LocalMarginReport& report);
json global_margin_to_json(const GlobalMarginReport& report);
json embedding_to_json(const EmbeddingReport& report);
json partial_order_to_json(const PartialOrderReport& report);
json rate_slope_to_json(const RateSlope& slope);
json inconsistency_to_json(const InconsistencyReport& report);

}  // namespace sparselabel
