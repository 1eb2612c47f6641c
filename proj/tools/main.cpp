// Command-line front end: label prediction over CSV rows, oracle equivalence
// spot checks, population risk evaluation, assumption diagnostics, rate
// sweeps, and the budget-rule inconsistency demo.
//
// Exit codes: 0 success, 1 validation/usage error (message names the flag or
// path), 2 property-check failure (witness on standard error).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparselabel/diagnostics.hpp"
#include "sparselabel/experiments.hpp"
#include "sparselabel/json_io.hpp"
#include "sparselabel/risk.hpp"

namespace sl = sparselabel;

namespace {

std::istream& open_input(const std::string& path, std::ifstream& file) {
  if (path == "-") return std::cin;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open input file " + path);
  return file;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  return file;
}

sl::DistributionSpec load_dist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open distribution file " + path);
  try {
    return sl::dist_from_json(sl::json::parse(in));
  } catch (const std::exception& e) {
    throw std::runtime_error("distribution file " + path + ": " + e.what());
  }
}

sl::RuleSpec rule_from_flags(const std::string& rule, int k, double beta, bool has_k,
                             bool has_beta) {
  if (rule == "topk") {
    if (!has_k) throw std::runtime_error("--rule topk requires --k");
    return sl::RuleSpec::TopK(k);
  }
  if (rule == "beta") {
    if (!has_beta) throw std::runtime_error("--rule beta requires --beta");
    return sl::RuleSpec::BetaBudget(beta);
  }
  if (rule == "mixed") {
    if (!has_k || !has_beta) throw std::runtime_error("--rule mixed requires --k and --beta");
    return sl::RuleSpec::Mixed(beta, k);
  }
  if (rule == "full") return sl::RuleSpec::Full();
  throw std::runtime_error("--rule must be one of topk|beta|mixed|full");
}

std::vector<std::int64_t> parse_grid(const std::string& csv) {
  std::vector<std::int64_t> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      grid.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw std::runtime_error("--n-grid entry \"" + tok + "\" is not an integer");
    }
  }
  return grid;
}

int cmd_predict(const std::string& input, const std::string& output, const sl::RuleSpec& rule) {
  std::ifstream fin;
  std::ofstream fout;
  std::istream& in = open_input(input, fin);
  std::ostream& out = open_output(output, fout);
  std::string line;
  std::int64_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    sl::ProbVector v{[&] {
      try {
        return sl::parse_prob_row(line);
      } catch (const std::exception& e) {
        throw std::runtime_error("input row " + std::to_string(row) + ": " + e.what());
      }
    }()};
    const sl::LabelVector f = sl::apply_rule(v, rule);
    out << sl::format_label_row(f.bits()) << '\n';
  }
  return 0;
}

int cmd_oracle_check(int labels, int trials, std::uint64_t seed) {
  if (labels < 2 || labels > 12) throw std::runtime_error("--L must lie in 2..12");
  if (trials < 1) throw std::runtime_error("--trials must be >= 1");
  std::int64_t checks = 0;
  for (int t = 0; t < trials; ++t) {
    sl::Rng rng(sl::derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<double> vals(static_cast<size_t>(labels));
    for (auto& v : vals) v = rng.uniform01();
    const sl::ProbVector v(vals);

    std::vector<sl::RuleSpec> rules;
    for (int k = 0; k <= labels; ++k) rules.push_back(sl::RuleSpec::TopK(k));
    for (int q = 1; q <= 4 * labels; ++q) rules.push_back(sl::RuleSpec::BetaBudget(0.25 * q));
    for (int k = 0; k <= labels; ++k) {
      for (int q = 1; q <= 4 * labels; ++q) rules.push_back(sl::RuleSpec::Mixed(0.25 * q, k));
    }
    rules.push_back(sl::RuleSpec::Full());

    for (const auto& rule : rules) {
      const sl::LabelVector closed = sl::apply_rule(v, rule);
      const double closed_fn = sl::conditional_fn_sum(closed, v);
      const auto best = sl::brute_force_oracle(v, rule);
      ++checks;
      if (std::abs(closed_fn - best.fn_sum) > 1e-12) {
        std::cerr << "oracle mismatch: trial " << t << " rule " << rule.describe() << " vector "
                  << sl::format_prob_row(v.span()) << " closed-form fn " << sl::format_double(closed_fn)
                  << " brute-force fn " << sl::format_double(best.fn_sum) << '\n';
        return 2;
      }
    }
  }
  std::cout << "oracle-check: " << checks << " comparisons, 0 violations\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained multi-label classifiers: prediction, risk evaluation, and simulation"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";
  std::string rule_name;
  int k = 0;
  double beta = 0.0;
  std::string dist_path;
  std::string config_path;
  std::string out_csv;
  std::string summary_path;
  std::string grid_csv = "128,256,512,1024,2048,4096,8192";
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  std::int64_t n_train = 1024;
  double gamma = 1.0;
  double c0 = 1.0;
  int margin_k = 1;
  int labels = 2;
  int trials = 500;
  std::int64_t replicates = 2000;
  int floor_profiles = 1000;
  int threads = 0;
  bool plugin = false;

  auto* predict = app.add_subcommand(
      "predict", "Apply a decision rule to probability rows (CSV in, 0/1 CSV out)");
  predict->add_option("--input,-i", input, "probability CSV, one row per instance ('-' = stdin)");
  predict->add_option("--output,-o", output, "label CSV destination ('-' = stdout)");
  predict->add_option("--rule", rule_name, "topk|beta|mixed|full")->required();
  auto* pk = predict->add_option("--k", k, "label count for topk/mixed");
  auto* pb = predict->add_option("--beta", beta, "false-positive budget for beta/mixed");

  auto* ocheck = app.add_subcommand(
      "oracle-check",
      "Compare the closed-form rules against exhaustive minimization on random vectors");
  ocheck->add_option("--L", labels, "label count (2..12)")->capture_default_str();
  ocheck->add_option("--trials", trials, "number of random vectors")->capture_default_str();
  ocheck->add_option("--seed", seed, "random seed")->capture_default_str();

  auto* risk = app.add_subcommand(
      "risk", "Population false-negative risk of a rule on a catalog distribution (JSON out)");
  risk->add_option("--dist", dist_path, "distribution JSON file")->required();
  risk->add_option("--rule", rule_name, "topk|beta|mixed|full")->required();
  auto* rk = risk->add_option("--k", k, "label count for topk/mixed");
  auto* rb = risk->add_option("--beta", beta, "false-positive budget for beta/mixed");
  risk->add_flag("--plugin", plugin, "evaluate the noisy plug-in rule instead of the oracle");
  risk->add_option("--n", n_train, "plug-in training size")->capture_default_str();
  risk->add_option("--gamma", gamma, "plug-in noise rate exponent")->capture_default_str();
  risk->add_option("--c0", c0, "plug-in noise scale constant")->capture_default_str();
  risk->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();
  risk->add_option("--seed", seed, "random seed")->capture_default_str();
  risk->add_option("--threads", threads, "worker count (0 = auto)")->capture_default_str();

  auto* assume = app.add_subcommand(
      "assumptions",
      "Margin/sparsity tail fits and pointwise stability checks for a distribution (JSON out)");
  assume->add_option("--dist", dist_path, "distribution JSON file")->required();
  assume->add_option("--beta", beta, "budget used by the margin checks")->capture_default_str();
  assume->add_option("--margin-k", margin_k, "level for the top-gap tail fit")->capture_default_str();
  assume->add_option("--n", n_train, "training size for the noise model")->capture_default_str();
  assume->add_option("--gamma", gamma, "noise rate exponent")->capture_default_str();
  assume->add_option("--c0", c0, "noise scale constant")->capture_default_str();
  assume->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();
  assume->add_option("--seed", seed, "random seed")->capture_default_str();
  assume->add_option("--output,-o", output, "report destination ('-' = stdout)");

  auto* rates = app.add_subcommand(
      "rates", "Excess-risk sweep over training sizes from an experiment config (CSV + slope)");
  rates->add_option("--config", config_path, "experiment config JSON file")->required();
  rates->add_option("--out-csv", out_csv, "per-replicate CSV destination (default: stdout)");
  rates->add_option("--summary", summary_path, "slope summary JSON destination");
  rates->add_option("--threads", threads, "worker count (0 = auto)")->capture_default_str();

  auto* lower = app.add_subcommand(
      "lowerbound",
      "Indistinguishable-pair demo: budget plug-in excess stays bounded away from zero");
  lower->add_option("--n-grid", grid_csv, "comma-separated training sizes")->capture_default_str();
  lower->add_option("--replicates", replicates, "noise draws per size")->capture_default_str();
  lower->add_option("--L", labels, "label count (>= 2)")->capture_default_str();
  lower->add_option("--seed", seed, "random seed")->capture_default_str();
  lower->add_option("--floor-profiles", floor_profiles, "random profiles for the floor check")
      ->capture_default_str();
  lower->add_option("--out-csv", out_csv, "per-size CSV destination (default: stdout)");
  lower->add_option("--summary", summary_path, "report JSON destination");
  lower->add_option("--threads", threads, "worker count (0 = auto)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or the help text
    return code == 0 ? 0 : 1;
  }

  try {
    if (predict->parsed()) {
      return cmd_predict(input, output,
                         rule_from_flags(rule_name, k, beta, pk->count() > 0, pb->count() > 0));
    }

    if (ocheck->parsed()) return cmd_oracle_check(labels, trials, seed);

    if (risk->parsed()) {
      const auto dist = load_dist(dist_path);
      const auto rule = rule_from_flags(rule_name, k, beta, rk->count() > 0, rb->count() > 0);
      rule.validate_for(dist.label_count());
      sl::MonteCarloSpec mc;
      mc.samples = samples;
      mc.seed = seed;
      sl::validate_monte_carlo(mc);
      const sl::Classifier cls =
          plugin ? sl::make_plugin_classifier(dist, rule, sl::EstimatorSpec(gamma, c0), n_train)
                 : sl::make_oracle_classifier(dist, rule);
      const auto est = sl::population_fn_risk(cls, dist, mc, threads);
      std::cout << sl::risk_to_json(est).dump(2) << '\n';
      return 0;
    }

    if (assume->parsed()) {
      const auto dist = load_dist(dist_path);
      if (beta == 0.0) beta = 1.0;
      if (margin_k < 1 || margin_k >= dist.label_count()) {
        throw std::runtime_error("--margin-k must lie in 1..L-1");
      }
      sl::MonteCarloSpec mc;
      mc.samples = samples;
      mc.seed = seed;
      sl::validate_monte_carlo(mc);
      const sl::EstimatorSpec est(gamma, c0);
      const auto grid = sl::default_delta_grid();

      const auto topgap = sl::check_topk_margin(dist, margin_k, grid, mc);
      const auto local = sl::check_local_margin(dist, beta, grid, mc);
      const double sup = sl::check_sparsity(dist, mc);
      const auto global = sl::check_global_margin(dist, beta, grid, mc);
      const auto embed = sl::check_embedding(dist, est, beta, n_train, mc);
      const auto order = sl::check_partial_order(dist, est, n_train, mc);

      sl::json report;
      report["top_gap_tail"] = sl::tail_fit_to_json(topgap);
      report["top_gap_tail"]["status"] = topgap.degenerate ? "degenerate" : "fitted";
      report["local_margin"] = sl::local_margin_to_json(local);
      report["local_margin"]["status"] = local.all_degenerate ? "degenerate" : "fitted";
      report["sparsity_sup"] = sup;
      report["global_margin"] = sl::global_margin_to_json(global);
      report["global_margin"]["status"] = global.feasible ? "feasible" : "infeasible";
      report["embedding"] = sl::embedding_to_json(embed);
      report["embedding"]["status"] = embed.violations == 0 ? "ok" : "violated";
      report["partial_order"] = sl::partial_order_to_json(order);
      report["partial_order"]["status"] = order.violations == 0 ? "ok" : "violated";

      std::ofstream fout;
      std::ostream& out = open_output(output, fout);
      out << report.dump(2) << '\n';
      if (embed.violations > 0 || order.violations > 0) {
        std::cerr << "pointwise stability violated; witness:\n";
        if (embed.violations > 0) std::cerr << sl::embedding_to_json(embed).dump(2) << '\n';
        if (order.violations > 0) std::cerr << sl::partial_order_to_json(order).dump(2) << '\n';
        return 2;
      }
      return 0;
    }

    if (rates->parsed()) {
      const auto cfg = sl::load_experiment_config(config_path);
      const auto results = sl::run_rate_sweep(cfg, threads);
      const std::string csv = sl::rate_results_csv(results);
      if (out_csv.empty()) {
        std::cout << csv;
      } else {
        std::ofstream f(out_csv);
        if (!f) throw std::runtime_error("cannot open output file " + out_csv);
        f << csv;
      }
      const auto slope = sl::fit_rate_slope(cfg, results);
      sl::json summary = sl::rate_slope_to_json(slope);
      summary["config"] = sl::experiment_to_json(cfg);
      if (!summary_path.empty()) {
        std::ofstream f(summary_path);
        if (!f) throw std::runtime_error("cannot open output file " + summary_path);
        f << summary.dump(2) << '\n';
      } else if (!out_csv.empty()) {
        std::cout << summary.dump(2) << '\n';
      }
      return 0;
    }

    if (lower->parsed()) {
      const auto grid = parse_grid(grid_csv);
      const auto report =
          sl::run_inconsistency_demo(grid, replicates, labels, seed, floor_profiles, threads);
      const std::string csv = sl::inconsistency_csv(report);
      if (out_csv.empty()) {
        std::cout << csv;
      } else {
        std::ofstream f(out_csv);
        if (!f) throw std::runtime_error("cannot open output file " + out_csv);
        f << csv;
      }
      if (!summary_path.empty()) {
        std::ofstream f(summary_path);
        if (!f) throw std::runtime_error("cannot open output file " + summary_path);
        f << sl::inconsistency_to_json(report).dump(2) << '\n';
      } else if (!out_csv.empty()) {
        std::cout << sl::inconsistency_to_json(report).dump(2) << '\n';
      }
      if (!report.floor_check.holds) {
        std::cerr << "excess-sum floor violated: min_sum "
                  << sl::format_double(report.floor_check.min_sum) << " < floor "
                  << sl::format_double(report.floor_check.floor) << '\n';
        return 2;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
