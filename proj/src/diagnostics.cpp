#include "sparselabel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparselabel/risk.hpp"
#include "sparselabel/rules.hpp"
#include "sparselabel/stats.hpp"

namespace sparselabel {

namespace {

constexpr std::uint64_t kTailSalt = 0x7461696cULL;
constexpr std::uint64_t kEmbedSalt = 0x656d626564ULL;
constexpr std::uint64_t kOrderSalt = 0x6f72646572ULL;
constexpr double kAlphaCap = 32.0;
constexpr double kAlphaFloor = 1e-9;

void validate_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("delta grid needs at least 2 points");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("delta grid must be strictly positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("delta grid must be strictly increasing");
    }
  }
}

// first grid slot that covers `value`, or grid size when value exceeds the
// grid
size_t bucket_of(std::span<const double> grid, double value) {
  return static_cast<size_t>(std::lower_bound(grid.begin(), grid.end(), value) - grid.begin());
}

std::vector<double> tail_probs(std::span<const std::int64_t> bucket_counts, std::int64_t samples) {
  std::vector<double> probs(bucket_counts.size());
  std::int64_t running = 0;
  for (size_t i = 0; i < bucket_counts.size(); ++i) {
    running += bucket_counts[i];
    probs[i] = static_cast<double>(running) / static_cast<double>(samples);
  }
  return probs;
}

TailFitReport fit_tail(std::span<const double> grid, std::vector<double> probs,
                       std::int64_t samples) {
  TailFitReport report;
  report.delta_grid.assign(grid.begin(), grid.end());
  report.empirical_probs = std::move(probs);

  const double min_prob = 10.0 / static_cast<double>(samples);
  std::vector<double> lx, ly;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double p = report.empirical_probs[i];
    if (p >= min_prob) {
      lx.push_back(std::log(grid[i]));
      ly.push_back(std::log(p));
    }
  }
  report.points_used = static_cast<int>(lx.size());
  if (report.points_used < 2) return report;  // stays degenerate

  const LinearFit fit = ols_fit(lx, ly);
  report.fitted_exponent = fit.slope;
  report.fitted_constant = std::exp(fit.intercept);
  report.r_squared = fit.r_squared;
  report.degenerate = false;
  return report;
}

}  // namespace

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  const int points = 12;
  const double lo = 0.02, hi = 0.9;
  for (int i = 0; i < points; ++i) {
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
  }
  grid.back() = hi;
  return grid;
}

TailFitReport check_topk_margin(const DistributionSpec& dist, int k,
                                std::span<const double> delta_grid, const MonteCarloSpec& mc) {
  validate_grid(delta_grid);
  validate_monte_carlo(mc);
  const int L = dist.label_count();
  if (k < 1 || k >= L) throw std::invalid_argument("margin level k must lie in 1..L-1");

  Rng rng(derive_seed(mc.seed, kTailSalt, 1));
  std::vector<double> eta(static_cast<size_t>(L));
  std::vector<std::int32_t> order(static_cast<size_t>(L));
  std::vector<std::int64_t> buckets(delta_grid.size(), 0);

  for (std::int64_t i = 0; i < mc.samples; ++i) {
    dist.eval_eta_into(rng.uniform01(), eta);
    rank_descending_into(eta, order);
    const double gap = eta[static_cast<size_t>(order[static_cast<size_t>(k - 1)])] -
                       eta[static_cast<size_t>(order[static_cast<size_t>(k)])];
    if (gap <= 0.0) continue;  // the tail event requires a strictly positive gap
    const size_t b = bucket_of(delta_grid, gap);
    if (b < buckets.size()) ++buckets[b];
  }
  return fit_tail(delta_grid, tail_probs(buckets, mc.samples), mc.samples);
}

LocalMarginReport check_local_margin(const DistributionSpec& dist, double beta,
                                     std::span<const double> delta_grid,
                                     const MonteCarloSpec& mc) {
  validate_grid(delta_grid);
  validate_monte_carlo(mc);
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const int L = dist.label_count();

  Rng rng(derive_seed(mc.seed, kTailSalt, 2));
  std::vector<double> eta(static_cast<size_t>(L));
  std::vector<std::int32_t> order(static_cast<size_t>(L));
  std::vector<std::vector<std::int64_t>> buckets(static_cast<size_t>(L),
                                                 std::vector<std::int64_t>(delta_grid.size(), 0));
  std::vector<std::int64_t> level_counts(static_cast<size_t>(L), 0);
  std::int64_t level_zero = 0;

  for (std::int64_t i = 0; i < mc.samples; ++i) {
    dist.eval_eta_into(rng.uniform01(), eta);
    rank_descending_into(eta, order);
    const int level = beta_threshold_ranked(eta, order, beta);
    if (level == 0) {
      ++level_zero;
      continue;
    }
    ++level_counts[static_cast<size_t>(level - 1)];
    const double upper = eta[static_cast<size_t>(order[static_cast<size_t>(level - 1)])];
    const double lower =
        level < L ? eta[static_cast<size_t>(order[static_cast<size_t>(level)])] : 0.0;
    const size_t b = bucket_of(delta_grid, upper - lower);
    if (b < delta_grid.size()) ++buckets[static_cast<size_t>(level - 1)][b];
  }

  LocalMarginReport report;
  report.delta_grid.assign(delta_grid.begin(), delta_grid.end());
  report.prob_level_zero = static_cast<double>(level_zero) / static_cast<double>(mc.samples);
  report.min_exponent = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= L; ++k) {
    report.level_probs.push_back(static_cast<double>(level_counts[static_cast<size_t>(k - 1)]) /
                                 static_cast<double>(mc.samples));
    TailFitReport tail =
        fit_tail(delta_grid, tail_probs(buckets[static_cast<size_t>(k - 1)], mc.samples),
                 mc.samples);
    if (!tail.degenerate) {
      report.all_degenerate = false;
      report.min_exponent = std::min(report.min_exponent, tail.fitted_exponent);
    }
    report.per_level.push_back(std::move(tail));
  }
  if (report.all_degenerate) report.min_exponent = 0.0;
  return report;
}

double check_sparsity(const DistributionSpec& dist, const MonteCarloSpec& mc) {
  validate_monte_carlo(mc);
  const int L = dist.label_count();
  Rng rng(derive_seed(mc.seed, kTailSalt, 3));
  std::vector<double> eta(static_cast<size_t>(L));
  double sup = 0.0;
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    dist.eval_eta_into(rng.uniform01(), eta);
    double total = 0.0;
    for (double e : eta) total += e;
    sup = std::max(sup, total);
  }
  return sup;
}

GlobalMarginReport check_global_margin(const DistributionSpec& dist, double beta,
                                       std::span<const double> delta_grid,
                                       const MonteCarloSpec& mc) {
  validate_grid(delta_grid);
  validate_monte_carlo(mc);
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const int L = dist.label_count();
  const int k_min = std::max(1, static_cast<int>(std::ceil(beta - 1e-12)));

  Rng rng(derive_seed(mc.seed, kTailSalt, 4));
  std::vector<double> eta(static_cast<size_t>(L));
  std::vector<std::int32_t> order(static_cast<size_t>(L));
  // triangular (k, l) cell counts, k = k_min..L, l = 1..k
  auto cell_slot = [&](int k, int l) {
    const int row = k - k_min;
    return static_cast<size_t>(row * (row - 1) / 2 + row * k_min + (l - 1));
  };
  std::vector<std::vector<std::int64_t>> buckets(
      cell_slot(L, L) + 1, std::vector<std::int64_t>(delta_grid.size(), 0));
  std::vector<std::int64_t> level_counts(static_cast<size_t>(L), 0);
  std::int64_t level_zero = 0;

  for (std::int64_t i = 0; i < mc.samples; ++i) {
    dist.eval_eta_into(rng.uniform01(), eta);
    rank_descending_into(eta, order);
    const int level = beta_threshold_ranked(eta, order, beta);
    if (level == 0) {
      ++level_zero;
      continue;
    }
    ++level_counts[static_cast<size_t>(level - 1)];
    if (level < k_min) continue;
    double window = 0.0;  // sum of (1 - eta) over ranks level-l+1..level
    for (int l = 1; l <= level; ++l) {
      window += 1.0 - eta[static_cast<size_t>(order[static_cast<size_t>(level - l)])];
      const double stat = std::abs(window - beta) / static_cast<double>(l);
      const size_t b = bucket_of(delta_grid, stat);
      if (b < delta_grid.size()) ++buckets[cell_slot(level, l)][b];
    }
  }

  GlobalMarginReport report;
  report.delta_grid.assign(delta_grid.begin(), delta_grid.end());
  report.prob_level_zero = static_cast<double>(level_zero) / static_cast<double>(mc.samples);
  for (int k = 1; k <= L; ++k) {
    report.level_probs.push_back(static_cast<double>(level_counts[static_cast<size_t>(k - 1)]) /
                                 static_cast<double>(mc.samples));
  }

  // Intersect the per-point exponent constraints P <= (beta*delta)^a * 2^-(k-l).
  double lower = kAlphaFloor;
  double upper = kAlphaCap;
  GlobalMarginPoint lower_pt, upper_pt;
  bool have_lower_pt = false, have_upper_pt = false;
  std::vector<GlobalMarginPoint> direct;

  for (int k = k_min; k <= L; ++k) {
    for (int l = 1; l <= k; ++l) {
      GlobalMarginCell cell;
      cell.k = k;
      cell.l = l;
      cell.probs = tail_probs(buckets[cell_slot(k, l)], mc.samples);
      for (size_t i = 0; i < delta_grid.size(); ++i) {
        const double p = cell.probs[i];
        if (p <= 0.0) continue;
        const GlobalMarginPoint pt{k, l, delta_grid[i], p};
        const double t = std::log(beta * delta_grid[i]);
        const double c = std::log(p) + (k - l) * std::log(2.0);
        if (t == 0.0) {
          if (c > 0.0) direct.push_back(pt);
        } else if (t > 0.0) {
          const double bound = c / t;
          if (bound > lower) {
            lower = bound;
            lower_pt = pt;
            have_lower_pt = true;
          }
        } else {
          const double bound = c / t;  // t < 0 flips the inequality
          if (bound < upper) {
            upper = bound;
            upper_pt = pt;
            have_upper_pt = true;
          }
        }
      }
      report.cells.push_back(std::move(cell));
    }
  }

  report.feasible = direct.empty() && lower <= upper;
  if (report.feasible) {
    report.alpha2_hat = upper;
  } else {
    report.violations = std::move(direct);
    if (lower > upper) {
      if (have_upper_pt) report.violations.push_back(upper_pt);
      if (have_lower_pt) report.violations.push_back(lower_pt);
    }
  }
  return report;
}

EmbeddingReport check_embedding(const DistributionSpec& dist, const EstimatorSpec& est,
                                double beta, std::int64_t n_train, const MonteCarloSpec& mc,
                                double tolerance) {
  validate_monte_carlo(mc);
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const int L = dist.label_count();
  const double scale = est.noise_scale(n_train);

  Rng rng(derive_seed(mc.seed, kEmbedSalt));
  std::vector<double> eta(static_cast<size_t>(L)), eta_hat(static_cast<size_t>(L));
  std::vector<std::int32_t> order(static_cast<size_t>(L));

  EmbeddingReport report;
  report.samples = mc.samples;
  report.tolerance = tolerance;
  report.max_violation = -std::numeric_limits<double>::infinity();

  for (std::int64_t i = 0; i < mc.samples; ++i) {
    const double x = rng.uniform01();
    dist.eval_eta_into(x, eta);
    noisy_eta_into(eta, scale, rng, eta_hat);
    rank_descending_into(eta_hat, order);
    const int m = beta_threshold_ranked(eta_hat, order, beta);

    double fp_true = 0.0;  // false-positive sum of the plug-in decision under the true eta
    for (int j = 0; j < m; ++j) fp_true += 1.0 - eta[static_cast<size_t>(order[static_cast<size_t>(j)])];
    double err_l1 = 0.0;
    for (int l = 0; l < L; ++l) err_l1 += std::abs(eta[static_cast<size_t>(l)] - eta_hat[static_cast<size_t>(l)]);

    const double gap = fp_true - (beta + err_l1);
    report.max_violation = std::max(report.max_violation, gap);
    if (gap > tolerance) {
      ++report.violations;
      if (!report.has_witness) {
        report.has_witness = true;
        report.witness_x = x;
        report.witness_eta = eta;
        report.witness_eta_hat = eta_hat;
      }
    }
  }
  return report;
}

PartialOrderReport check_partial_order(const DistributionSpec& dist, const EstimatorSpec& est,
                                       std::int64_t n_train, const MonteCarloSpec& mc) {
  validate_monte_carlo(mc);
  const int L = dist.label_count();
  if (L > 64) throw std::invalid_argument("partial order check supports at most 64 labels");
  const double scale = est.noise_scale(n_train);

  Rng rng(derive_seed(mc.seed, kOrderSalt));
  std::vector<double> eta(static_cast<size_t>(L)), eta_hat(static_cast<size_t>(L));
  std::vector<std::int32_t> order(static_cast<size_t>(L)), order_hat(static_cast<size_t>(L));

  PartialOrderReport report;
  report.samples = mc.samples;

  for (std::int64_t i = 0; i < mc.samples; ++i) {
    const double x = rng.uniform01();
    dist.eval_eta_into(x, eta);
    noisy_eta_into(eta, scale, rng, eta_hat);
    rank_descending_into(eta, order);
    rank_descending_into(eta_hat, order_hat);
    double err = 0.0;
    for (int l = 0; l < L; ++l) {
      err = std::max(err, std::abs(eta[static_cast<size_t>(l)] - eta_hat[static_cast<size_t>(l)]));
    }
    std::uint64_t top_true = 0, top_hat = 0;
    for (int k = 1; k <= L; ++k) {
      top_true |= std::uint64_t{1} << order[static_cast<size_t>(k - 1)];
      top_hat |= std::uint64_t{1} << order_hat[static_cast<size_t>(k - 1)];
      const double upper = eta[static_cast<size_t>(order[static_cast<size_t>(k - 1)])];
      const double lower = k < L ? eta[static_cast<size_t>(order[static_cast<size_t>(k)])] : 0.0;
      if (2.0 * err < upper - lower) {
        ++report.qualifying;
        if (top_true != top_hat) {
          ++report.violations;
          if (!report.has_witness) {
            report.has_witness = true;
            report.witness_x = x;
            report.witness_level = k;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace sparselabel
