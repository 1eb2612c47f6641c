#include "sparselabel/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace sparselabel {

namespace {

// .at() with a clearer error than nlohmann's "out of range" default
const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing key \"") + key + '"');
  }
  return *it;
}

std::string family_name(DistFamily family) {
  switch (family) {
    case DistFamily::two_label_linear: return "two_label_linear";
    case DistFamily::topk_poly_margin: return "topk_poly_margin";
    case DistFamily::beta_staircase: return "beta_staircase";
    case DistFamily::lowerbound_pm: return "lowerbound_pm";
  }
  throw std::logic_error("unreachable family");
}

std::string kind_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::top_k: return "top_k";
    case RuleKind::beta_budget: return "beta_budget";
    case RuleKind::mixed: return "mixed";
    case RuleKind::full: return "full";
  }
  throw std::logic_error("unreachable rule kind");
}

}  // namespace

json dist_to_json(const DistributionSpec& dist) {
  json j;
  j["family"] = family_name(dist.family());
  switch (dist.family()) {
    case DistFamily::two_label_linear:
      break;
    case DistFamily::topk_poly_margin:
      j["alpha"] = dist.alpha();
      j["labels"] = dist.label_count();
      j["k"] = dist.margin_k();
      break;
    case DistFamily::beta_staircase: {
      j["beta"] = dist.staircase_beta();
      j["labels"] = dist.label_count();
      json cells = json::array();
      for (const auto& c : dist.cells()) {
        cells.push_back({{"weight", c.weight},
                         {"k", c.k},
                         {"eta_high", c.eta_high},
                         {"eta_low", c.eta_low}});
      }
      j["cells"] = std::move(cells);
      break;
    }
    case DistFamily::lowerbound_pm:
      j["rho"] = dist.rho();
      j["phi_inv"] = dist.phi_inv();
      j["labels"] = dist.label_count();
      break;
  }
  return j;
}

DistributionSpec dist_from_json(const json& j) {
  const std::string family = require(j, "family").get<std::string>();
  if (family == "two_label_linear") {
    return DistributionSpec::two_label_linear();
  }
  if (family == "topk_poly_margin") {
    return DistributionSpec::topk_poly_margin(require(j, "alpha").get<double>(),
                                              require(j, "labels").get<int>(),
                                              require(j, "k").get<int>());
  }
  if (family == "beta_staircase") {
    std::vector<StaircaseCell> cells;
    for (const auto& c : require(j, "cells")) {
      cells.push_back(StaircaseCell{require(c, "weight").get<double>(),
                                    require(c, "k").get<int>(),
                                    require(c, "eta_high").get<double>(),
                                    require(c, "eta_low").get<double>()});
    }
    return DistributionSpec::beta_staircase(std::move(cells), require(j, "beta").get<double>(),
                                            require(j, "labels").get<int>());
  }
  if (family == "lowerbound_pm") {
    return DistributionSpec::lowerbound_pm(require(j, "rho").get<int>(),
                                           require(j, "phi_inv").get<double>(),
                                           require(j, "labels").get<int>());
  }
  throw std::invalid_argument("unknown distribution family \"" + family + '"');
}

json estimator_to_json(const EstimatorSpec& est) {
  return json{{"gamma", est.gamma}, {"c0", est.c0}};
}

EstimatorSpec estimator_from_json(const json& j) {
  return EstimatorSpec(require(j, "gamma").get<double>(), require(j, "c0").get<double>());
}

json rule_to_json(const RuleSpec& rule) {
  json j;
  j["kind"] = kind_name(rule.kind);
  switch (rule.kind) {
    case RuleKind::top_k: j["k"] = rule.k; break;
    case RuleKind::beta_budget: j["beta"] = rule.beta; break;
    case RuleKind::mixed:
      j["beta"] = rule.beta;
      j["k"] = rule.k;
      break;
    case RuleKind::full: break;
  }
  return j;
}

RuleSpec rule_from_json(const json& j) {
  const std::string kind = require(j, "kind").get<std::string>();
  if (kind == "top_k") return RuleSpec::TopK(require(j, "k").get<int>());
  if (kind == "beta_budget") return RuleSpec::BetaBudget(require(j, "beta").get<double>());
  if (kind == "mixed") {
    return RuleSpec::Mixed(require(j, "beta").get<double>(), require(j, "k").get<int>());
  }
  if (kind == "full") return RuleSpec::Full();
  throw std::invalid_argument("unknown rule kind \"" + kind + '"');
}

json mc_to_json(const MonteCarloSpec& mc) {
  return json{{"samples", mc.samples}, {"seed", mc.seed}};
}

MonteCarloSpec mc_from_json(const json& j) {
  MonteCarloSpec mc;
  mc.samples = require(j, "samples").get<std::int64_t>();
  mc.seed = require(j, "seed").get<std::uint64_t>();
  validate_monte_carlo(mc);
  return mc;
}

json experiment_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dist"] = dist_to_json(cfg.dist);
  j["est"] = estimator_to_json(cfg.est);
  j["rule"] = rule_to_json(cfg.rule);
  j["n_grid"] = cfg.n_grid;
  j["replicates"] = cfg.replicates;
  j["mc"] = mc_to_json(cfg.mc);
  j["master_seed"] = cfg.master_seed;
  return j;
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.dist = dist_from_json(require(j, "dist"));
  cfg.est = estimator_from_json(require(j, "est"));
  cfg.rule = rule_from_json(require(j, "rule"));
  cfg.n_grid = require(j, "n_grid").get<std::vector<std::int64_t>>();
  if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
  if (j.contains("mc")) cfg.mc = mc_from_json(j.at("mc"));
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  validate_experiment(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  try {
    const json j = json::parse(in);
    return experiment_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
}

json risk_to_json(const RiskEstimate& est) {
  return json{{"value", est.value}, {"std_error", est.std_error}, {"exact", est.exact}};
}

json excess_to_json(const ExcessEstimate& est) {
  return json{{"excess_signed", est.excess_signed}, {"excess_abs", est.excess_abs},
              {"rule_risk", est.rule_risk},         {"oracle_risk", est.oracle_risk},
              {"std_error", est.std_error},         {"exact", est.exact}};
}

json pairwise_bound_to_json(const PairwiseBoundEstimate& est) {
  return json{{"value", est.value}, {"std_error", est.std_error}};
}

json tail_fit_to_json(const TailFitReport& report) {
  return json{{"delta_grid", report.delta_grid},
              {"empirical_probs", report.empirical_probs},
              {"fitted_exponent", report.fitted_exponent},
              {"fitted_constant", report.fitted_constant},
              {"r_squared", report.r_squared},
              {"points_used", report.points_used},
              {"degenerate", report.degenerate}};
}

json local_margin_to_json(const LocalMarginReport& report) {
  json levels = json::array();
  for (const auto& fit : report.per_level) levels.push_back(tail_fit_to_json(fit));
  return json{{"delta_grid", report.delta_grid},
              {"per_level", std::move(levels)},
              {"level_probs", report.level_probs},
              {"prob_level_zero", report.prob_level_zero},
              {"min_exponent", report.min_exponent},
              {"all_degenerate", report.all_degenerate}};
}

json global_margin_to_json(const GlobalMarginReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"k", cell.k}, {"l", cell.l}, {"probs", cell.probs}});
  }
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"k", v.k}, {"l", v.l}, {"delta", v.delta}, {"prob", v.prob}});
  }
  return json{{"delta_grid", report.delta_grid},
              {"cells", std::move(cells)},
              {"level_probs", report.level_probs},
              {"prob_level_zero", report.prob_level_zero},
              {"feasible", report.feasible},
              {"alpha2_hat", report.alpha2_hat},
              {"violations", std::move(violations)}};
}

json embedding_to_json(const EmbeddingReport& report) {
  json j{{"samples", report.samples},
         {"violations", report.violations},
         {"max_violation", report.max_violation},
         {"tolerance", report.tolerance}};
  if (report.has_witness) {
    j["witness"] = json{{"x", report.witness_x},
                        {"eta", report.witness_eta},
                        {"eta_hat", report.witness_eta_hat}};
  }
  return j;
}

json partial_order_to_json(const PartialOrderReport& report) {
  json j{{"samples", report.samples},
         {"qualifying", report.qualifying},
         {"violations", report.violations}};
  if (report.has_witness) {
    j["witness"] = json{{"x", report.witness_x}, {"level", report.witness_level}};
  }
  return j;
}

json rate_slope_to_json(const RateSlope& slope) {
  return json{{"slope", slope.slope},
              {"intercept", slope.intercept},
              {"stderr_slope", slope.stderr_slope},
              {"points_used", slope.points_used}};
}

json inconsistency_to_json(const InconsistencyReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"n", r.n},
                    {"phi_inv", r.phi_inv},
                    {"excess_plus", r.excess_plus},
                    {"excess_minus", r.excess_minus},
                    {"max_scaled", r.max_scaled}});
  }
  return json{{"labels", report.labels},
              {"rows", std::move(rows)},
              {"floor_check", json{{"profiles", report.floor_check.profiles},
                                   {"min_sum", report.floor_check.min_sum},
                                   {"floor", report.floor_check.floor},
                                   {"holds", report.floor_check.holds}}}};
}

}  // namespace sparselabel
