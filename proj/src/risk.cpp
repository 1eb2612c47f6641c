#include "sparselabel/risk.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sparselabel/parallel.hpp"

namespace sparselabel {

namespace {

void check_shapes(int f_size, int eta_size) {
  if (f_size != eta_size) {
    throw std::invalid_argument("decision and probability vectors have different lengths");
  }
}

constexpr std::int64_t kBlockSize = 8192;  // fixed, so results ignore the worker count
constexpr std::uint64_t kRiskSalt = 0x7269736b6d63ULL;

struct BlockMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Mean and standard error of per-sample values produced by `value_of`,
// evaluated over mc.samples draws in fixed-size blocks with per-block
// streams.
template <typename ValueFn>
std::pair<double, double> blocked_mc(const MonteCarloSpec& mc, int threads, ValueFn&& value_of) {
  const std::int64_t n = mc.samples;
  const std::int64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockMoments> partial(static_cast<size_t>(n_blocks));

  parallel_for(n_blocks, threads, [&](std::int64_t b) {
    Rng rng(derive_seed(mc.seed, static_cast<std::uint64_t>(b), kRiskSalt));
    const std::int64_t begin = b * kBlockSize;
    const std::int64_t end = std::min(n, begin + kBlockSize);
    BlockMoments m;
    for (std::int64_t i = begin; i < end; ++i) {
      const double v = value_of(rng);
      m.sum += v;
      m.sum_sq += v * v;
    }
    partial[static_cast<size_t>(b)] = m;
  });

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& m : partial) {
    sum += m.sum;
    sum_sq += m.sum_sq;
  }
  const double mean = sum / static_cast<double>(n);
  double se = 0.0;
  if (n > 1) {
    const double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
    se = var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  }
  return {mean, se};
}

}  // namespace

double conditional_fn_sum(const LabelVector& f, const ProbVector& eta) {
  check_shapes(f.size(), eta.size());
  double sum = 0.0;
  for (int l = 0; l < f.size(); ++l) {
    if (f[l] == 0) sum += eta[l];
  }
  return sum;
}

double conditional_fp_sum(const LabelVector& f, const ProbVector& eta) {
  check_shapes(f.size(), eta.size());
  double sum = 0.0;
  for (int l = 0; l < f.size(); ++l) {
    if (f[l] == 1) sum += 1.0 - eta[l];
  }
  return sum;
}

Classifier make_oracle_classifier(const DistributionSpec& dist, const RuleSpec& rule) {
  rule.validate_for(dist.label_count());
  return Classifier{
      [dist, rule](double x, Rng&) { return apply_rule(dist.eval_eta(x), rule); },
      false};
}

Classifier make_plugin_classifier(const DistributionSpec& dist, const RuleSpec& rule,
                                  const EstimatorSpec& est, std::int64_t n_train) {
  rule.validate_for(dist.label_count());
  const double scale = est.noise_scale(n_train);
  if (scale == 0.0) return make_oracle_classifier(dist, rule);
  return Classifier{
      [dist, rule, est, n_train](double x, Rng& rng) {
        return apply_rule(noisy_eta(dist, est, n_train, x, rng), rule);
      },
      true};
}

Classifier make_constant_classifier(LabelVector f) {
  return Classifier{[f = std::move(f)](double, Rng&) { return f; }, false};
}

RiskEstimate population_fn_risk(const Classifier& rule, const DistributionSpec& dist,
                                const MonteCarloSpec& mc, int threads) {
  validate_monte_carlo(mc);
  const double L = static_cast<double>(dist.label_count());

  if (dist.piecewise_constant() && !rule.stochastic) {
    Rng unused(0);
    double value = 0.0;
    for (const auto& [weight, x] : dist.quadrature_cells()) {
      value += weight * conditional_fn_sum(rule.decide(x, unused), dist.eval_eta(x)) / L;
    }
    return RiskEstimate{value, 0.0, true};
  }

  auto [mean, se] = blocked_mc(mc, threads, [&](Rng& rng) {
    const double x = rng.uniform01();
    return conditional_fn_sum(rule.decide(x, rng), dist.eval_eta(x)) / L;
  });
  return RiskEstimate{mean, se, false};
}

ExcessEstimate excess_risk(const Classifier& rule, const RuleSpec& family,
                           const DistributionSpec& dist, const MonteCarloSpec& mc, int threads) {
  validate_monte_carlo(mc);
  const Classifier oracle = make_oracle_classifier(dist, family);
  const double L = static_cast<double>(dist.label_count());

  ExcessEstimate out;
  if (dist.piecewise_constant() && !rule.stochastic) {
    const RiskEstimate r = population_fn_risk(rule, dist, mc, threads);
    const RiskEstimate o = population_fn_risk(oracle, dist, mc, threads);
    out.rule_risk = r.value;
    out.oracle_risk = o.value;
    out.excess_signed = r.value - o.value;
    out.exact = true;
  } else {
    // one pass, both rules on the same feature draws
    struct Part {
      double diff = 0.0, diff_sq = 0.0, rule = 0.0, oracle = 0.0;
    };
    const std::int64_t n = mc.samples;
    const std::int64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Part> partial(static_cast<size_t>(n_blocks));
    parallel_for(n_blocks, threads, [&](std::int64_t b) {
      Rng rng(derive_seed(mc.seed, static_cast<std::uint64_t>(b), kRiskSalt));
      const std::int64_t begin = b * kBlockSize;
      const std::int64_t end = std::min(n, begin + kBlockSize);
      Part p;
      for (std::int64_t i = begin; i < end; ++i) {
        const double x = rng.uniform01();
        const ProbVector eta = dist.eval_eta(x);
        const double rule_fn = conditional_fn_sum(rule.decide(x, rng), eta) / L;
        const double oracle_fn = conditional_fn_sum(oracle.decide(x, rng), eta) / L;
        const double d = rule_fn - oracle_fn;
        p.diff += d;
        p.diff_sq += d * d;
        p.rule += rule_fn;
        p.oracle += oracle_fn;
      }
      partial[static_cast<size_t>(b)] = p;
    });
    Part total;
    for (const auto& p : partial) {
      total.diff += p.diff;
      total.diff_sq += p.diff_sq;
      total.rule += p.rule;
      total.oracle += p.oracle;
    }
    const double nd = static_cast<double>(n);
    out.excess_signed = total.diff / nd;
    out.rule_risk = total.rule / nd;
    out.oracle_risk = total.oracle / nd;
    if (n > 1) {
      const double var = (total.diff_sq - nd * out.excess_signed * out.excess_signed) / (nd - 1.0);
      out.std_error = var > 0.0 ? std::sqrt(var / nd) : 0.0;
    }
    out.exact = false;
  }
  out.excess_abs = std::abs(out.excess_signed);
  return out;
}

PairwiseBoundEstimate pairwise_excess_bound(const Classifier& rule, const DistributionSpec& dist,
                                            const MonteCarloSpec& mc, int top_k, int threads) {
  validate_monte_carlo(mc);
  const int L = dist.label_count();
  if (top_k < 0 || top_k > L) throw std::invalid_argument("top_k must lie in 0..L");

  auto [mean, se] = blocked_mc(mc, threads, [&](Rng& rng) {
    const double x = rng.uniform01();
    const ProbVector eta = dist.eval_eta(x);
    const Ranking order = rank_descending(eta);
    const LabelVector f = rule.decide(x, rng);
    if (f.size() != L) throw std::invalid_argument("rule output has wrong length");
    double sum = 0.0;
    for (int l = 0; l < top_k; ++l) {
      const int a = order[l];
      if (f[a] != 0) continue;
      for (int j = top_k; j < L; ++j) {
        const int b = order[j];
        if (f[b] == 1) sum += eta[a] - eta[b];
      }
    }
    return sum / static_cast<double>(L);
  });
  return PairwiseBoundEstimate{mean, se};
}

}  // namespace sparselabel
