#include "sparselabel/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparselabel/parallel.hpp"
#include "sparselabel/stats.hpp"

namespace sparselabel {

namespace {

constexpr int kMaxLabels = 64;
constexpr std::uint64_t kRateSalt = 0x72617465ULL;
constexpr std::uint64_t kDemoSalt = 0x64656d6fULL;
constexpr std::uint64_t kFloorSalt = 0x666c6f6f72ULL;

// One replicate: paired estimate of E[fn(plug-in) - fn(oracle)] / L and of
// the oracle risk, sharing every feature draw. `prefix_count` maps a ranked
// probability vector to the number of top-ranked labels switched on; all
// four families are prefix rules. Stack buffers keep the loop allocation
// free; this kernel runs billions of iterations across a sweep.
template <typename CountFn>
void replicate_excess(const DistributionSpec& dist, double scale, std::int64_t samples, Rng& rng,
                      CountFn&& prefix_count, double& excess_out, double& oracle_out) {
  const int L = dist.label_count();
  double eta[kMaxLabels];
  double eta_hat[kMaxLabels];
  std::int32_t order[kMaxLabels];
  std::int32_t order_hat[kMaxLabels];
  const std::span<double> eta_span(eta, static_cast<size_t>(L));
  const std::span<double> eta_hat_span(eta_hat, static_cast<size_t>(L));
  const std::span<std::int32_t> order_span(order, static_cast<size_t>(L));
  const std::span<std::int32_t> order_hat_span(order_hat, static_cast<size_t>(L));

  double diff_sum = 0.0;
  double oracle_sum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double x = rng.uniform01();
    dist.eval_eta_into(x, eta_span);
    rank_descending_into(eta_span, order_span);
    const int c_star = prefix_count(eta_span, order_span);
    double fn_star = 0.0;
    for (int j = c_star; j < L; ++j) fn_star += eta[order[j]];
    oracle_sum += fn_star;

    if (scale == 0.0) continue;  // the plug-in coincides with the oracle
    noisy_eta_into(eta_span, scale, rng, eta_hat_span);
    rank_descending_into(eta_hat_span, order_hat_span);
    const int c_hat = prefix_count(eta_hat_span, order_hat_span);
    double fn_hat = 0.0;  // false negatives of the plug-in under the true eta
    for (int j = c_hat; j < L; ++j) fn_hat += eta[order_hat[j]];
    diff_sum += fn_hat - fn_star;
  }
  const double denom = static_cast<double>(samples) * static_cast<double>(L);
  excess_out = diff_sum / denom;
  oracle_out = oracle_sum / denom;
}

template <typename CountFn>
void run_replicate(const ExperimentConfig& cfg, std::int64_t n, int replicate,
                   CountFn&& prefix_count, RateResult& out) {
  Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                      static_cast<std::uint64_t>(replicate), kRateSalt));
  const double scale = cfg.est.noise_scale(n);
  double excess = 0.0, oracle = 0.0;
  replicate_excess(cfg.dist, scale, cfg.mc.samples, rng, prefix_count, excess, oracle);
  out.n = n;
  out.replicate = replicate;
  out.excess_signed = excess;
  out.excess_abs = std::abs(excess);
  out.oracle_risk = oracle;
}

}  // namespace

void validate_experiment(const ExperimentConfig& cfg) {
  const int L = cfg.dist.label_count();
  if (L > kMaxLabels) throw std::invalid_argument("rate sweeps support at most 64 labels");
  cfg.rule.validate_for(L);
  if (cfg.n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw std::invalid_argument("n_grid entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw std::invalid_argument("n_grid must be strictly increasing");
    }
  }
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  validate_monte_carlo(cfg.mc);
}

std::vector<RateResult> run_rate_sweep(const ExperimentConfig& cfg, int threads) {
  validate_experiment(cfg);
  const int L = cfg.dist.label_count();
  const std::int64_t tasks =
      static_cast<std::int64_t>(cfg.n_grid.size()) * static_cast<std::int64_t>(cfg.replicates);
  std::vector<RateResult> results(static_cast<size_t>(tasks));

  parallel_for(tasks, threads, [&](std::int64_t t) {
    const std::int64_t n = cfg.n_grid[static_cast<size_t>(t / cfg.replicates)];
    const int replicate = static_cast<int>(t % cfg.replicates);
    RateResult& out = results[static_cast<size_t>(t)];
    switch (cfg.rule.kind) {
      case RuleKind::top_k: {
        const int k = cfg.rule.k;
        run_replicate(cfg, n, replicate,
                      [k](std::span<const double>, std::span<const std::int32_t>) { return k; },
                      out);
        break;
      }
      case RuleKind::beta_budget: {
        const double beta = cfg.rule.beta;
        run_replicate(cfg, n, replicate,
                      [beta](std::span<const double> v, std::span<const std::int32_t> ord) {
                        return beta_threshold_ranked(v, ord, beta);
                      },
                      out);
        break;
      }
      case RuleKind::mixed: {
        const double beta = cfg.rule.beta;
        const int k = cfg.rule.k;
        run_replicate(cfg, n, replicate,
                      [beta, k](std::span<const double> v, std::span<const std::int32_t> ord) {
                        return std::min(beta_threshold_ranked(v, ord, beta), k);
                      },
                      out);
        break;
      }
      case RuleKind::full: {
        run_replicate(cfg, n, replicate,
                      [L](std::span<const double>, std::span<const std::int32_t>) { return L; },
                      out);
        break;
      }
    }
  });
  return results;
}

std::vector<double> mean_abs_excess_by_n(const ExperimentConfig& cfg,
                                         const std::vector<RateResult>& results) {
  std::vector<double> sums(cfg.n_grid.size(), 0.0);
  std::vector<std::int64_t> counts(cfg.n_grid.size(), 0);
  for (const auto& r : results) {
    const auto it = std::find(cfg.n_grid.begin(), cfg.n_grid.end(), r.n);
    if (it == cfg.n_grid.end()) throw std::invalid_argument("result n not in the config grid");
    const size_t i = static_cast<size_t>(it - cfg.n_grid.begin());
    sums[i] += r.excess_abs;
    ++counts[i];
  }
  std::vector<double> means(cfg.n_grid.size(), 0.0);
  for (size_t i = 0; i < sums.size(); ++i) {
    if (counts[i] == 0) throw std::invalid_argument("grid point without results");
    means[i] = sums[i] / static_cast<double>(counts[i]);
  }
  return means;
}

RateSlope fit_rate_slope(const ExperimentConfig& cfg, const std::vector<RateResult>& results) {
  const std::vector<double> means = mean_abs_excess_by_n(cfg, results);
  std::vector<double> lx, ly;
  for (size_t i = 0; i < means.size(); ++i) {
    if (means[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(cfg.n_grid[i])));
      ly.push_back(std::log(means[i]));
    }
  }
  if (lx.size() < 3) {
    throw std::runtime_error("rate fit needs at least 3 grid points with positive mean excess");
  }
  const LinearFit fit = ols_fit(lx, ly);
  return RateSlope{fit.slope, fit.intercept, fit.stderr_slope, fit.n};
}

std::string rate_results_csv(const std::vector<RateResult>& results) {
  std::string out = "n,replicate,excess_signed,excess_abs,oracle_risk\n";
  for (const auto& r : results) {
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.replicate);
    out += ',';
    out += format_double(r.excess_signed);
    out += ',';
    out += format_double(r.excess_abs);
    out += ',';
    out += format_double(r.oracle_risk);
    out += '\n';
  }
  return out;
}

std::pair<double, double> profile_excess_pair(double a, double b, double phi_inv, int labels) {
  if (labels < 2) throw std::invalid_argument("labels must be >= 2");
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
    throw std::invalid_argument("profile probabilities must lie in [0,1]");
  }
  if (!(phi_inv > 0.0 && phi_inv <= 0.125)) {
    throw std::invalid_argument("phi_inv must lie in (0, 1/8]");
  }
  const double L = static_cast<double>(labels);
  // risk of the profile minus the oracle risk, under each sign:
  //   +1: oracle keeps only label 1, risk (1/4 - phi)/L
  //   -1: oracle keeps labels 1 and 2, risk 0
  const double e_plus = std::abs(0.75 * a + (0.25 - phi_inv) * (b - 1.0)) / L;
  const double e_minus = std::abs(0.75 * a + (0.25 + phi_inv) * b) / L;
  return {e_plus, e_minus};
}

InconsistencyReport run_inconsistency_demo(std::span<const std::int64_t> n_grid,
                                           std::int64_t replicates, int labels,
                                           std::uint64_t seed, int floor_profiles, int threads) {
  if (labels < 2 || labels > kMaxLabels) throw std::invalid_argument("labels must lie in 2..64");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw std::invalid_argument("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("n_grid must be strictly increasing");
    }
  }
  if (floor_profiles < 1) throw std::invalid_argument("floor_profiles must be >= 1");

  InconsistencyReport report;
  report.labels = labels;
  report.rows.assign(n_grid.size(), InconsistencyRow{});

  const double L = static_cast<double>(labels);
  parallel_for(static_cast<std::int64_t>(n_grid.size()), threads, [&](std::int64_t t) {
    const std::int64_t n = n_grid[static_cast<size_t>(t)];
    const double phi = choose_phi_inv(n, 0.5);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    double excess[2] = {0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
      const int rho = s == 0 ? 1 : -1;
      const DistributionSpec dist = DistributionSpec::lowerbound_pm(rho, phi, labels);
      const ProbVector eta = dist.eval_eta(0.5);
      const Ranking order = rank_descending(eta);
      const int c_star = beta_threshold_ranked(eta.span(), order.order(), 1.0);
      double oracle_fn = 0.0;
      for (int j = c_star; j < labels; ++j) oracle_fn += eta[order[j]];
      const double oracle_risk = oracle_fn / L;

      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(s),
                          kDemoSalt));
      std::vector<double> eta_hat(static_cast<size_t>(labels));
      std::vector<std::int32_t> order_hat(static_cast<size_t>(labels));
      double abs_sum = 0.0;
      for (std::int64_t r = 0; r < replicates; ++r) {
        noisy_eta_into(eta.span(), scale, rng, eta_hat);
        rank_descending_into(eta_hat, order_hat);
        const int c_hat = beta_threshold_ranked(eta_hat, order_hat, 1.0);
        double fn = 0.0;  // eta is constant in x, so this is the exact risk of the draw
        for (int j = c_hat; j < labels; ++j) fn += eta[order_hat[static_cast<size_t>(j)]];
        abs_sum += std::abs(fn / L - oracle_risk);
      }
      excess[s] = abs_sum / static_cast<double>(replicates);
    }

    report.rows[static_cast<size_t>(t)] = InconsistencyRow{
        n, phi, excess[0], excess[1], L * std::max(excess[0], excess[1])};
  });

  // closed-form floor over random decision profiles
  FloorCheck floor;
  floor.profiles = floor_profiles;
  floor.floor = 1.0 / (8.0 * L);
  floor.min_sum = std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(seed, kFloorSalt));
  for (int p = 0; p < floor_profiles; ++p) {
    const double a = rng.uniform01();
    const double b = rng.uniform01();
    const double phi = 0.125 * rng.uniform_pos();
    const auto [e_plus, e_minus] = profile_excess_pair(a, b, phi, labels);
    floor.min_sum = std::min(floor.min_sum, e_plus + e_minus);
  }
  floor.holds = floor.min_sum >= floor.floor - 1e-12;
  report.floor_check = floor;
  return report;
}

std::string inconsistency_csv(const InconsistencyReport& report) {
  std::string out = "n,phi_inv,excess_plus,excess_minus,max_scaled\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.phi_inv);
    out += ',';
    out += format_double(r.excess_plus);
    out += ',';
    out += format_double(r.excess_minus);
    out += ',';
    out += format_double(r.max_scaled);
    out += '\n';
  }
  return out;
}

}  // namespace sparselabel
