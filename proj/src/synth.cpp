#include "sparselabel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparselabel {

DistributionSpec DistributionSpec::two_label_linear() {
  DistributionSpec d;
  d.family_ = DistFamily::two_label_linear;
  d.labels_ = 2;
  return d;
}

DistributionSpec DistributionSpec::topk_poly_margin(double alpha, int labels, int k) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite and > 0");
  if (labels < 2) throw std::invalid_argument("topk_poly_margin needs at least 2 labels");
  if (k < 1 || k >= labels) throw std::invalid_argument("topk_poly_margin needs 1 <= k < L");
  DistributionSpec d;
  d.family_ = DistFamily::topk_poly_margin;
  d.labels_ = labels;
  d.alpha_ = alpha;
  d.k_ = k;
  return d;
}

DistributionSpec DistributionSpec::beta_staircase(std::vector<StaircaseCell> cells, double beta,
                                                  int labels) {
  if (cells.empty()) throw std::invalid_argument("beta_staircase needs at least one cell");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (labels < 2) throw std::invalid_argument("beta_staircase needs at least 2 labels");
  double total = 0.0;
  for (size_t j = 0; j < cells.size(); ++j) {
    const auto& c = cells[j];
    const std::string tag = "cell " + std::to_string(j) + ": ";
    if (!(c.weight > 0.0)) throw std::invalid_argument(tag + "weight must be > 0");
    if (c.k < 1 || c.k >= labels) throw std::invalid_argument(tag + "needs 1 <= k < L");
    if (!(c.eta_high >= 0.0 && c.eta_high <= 1.0) || !(c.eta_low >= 0.0 && c.eta_low <= 1.0)) {
      throw std::invalid_argument(tag + "eta levels must lie in [0,1]");
    }
    if (!(c.eta_high > c.eta_low)) throw std::invalid_argument(tag + "eta_high must exceed eta_low");
    // exactly the k high labels must fit the budget
    const double high_cost = c.k * (1.0 - c.eta_high);
    if (high_cost > beta) throw std::invalid_argument(tag + "k*(1-eta_high) exceeds beta");
    if (high_cost + (1.0 - c.eta_low) <= beta) {
      throw std::invalid_argument(tag + "budget does not exclude the first low label");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("cell weights must sum to 1");
  DistributionSpec d;
  d.family_ = DistFamily::beta_staircase;
  d.labels_ = labels;
  d.cells_ = std::move(cells);
  d.beta_ = beta;
  return d;
}

DistributionSpec DistributionSpec::lowerbound_pm(int rho, double phi_inv, int labels) {
  if (rho != 1 && rho != -1) throw std::invalid_argument("rho must be +1 or -1");
  if (!(phi_inv > 0.0 && phi_inv <= 0.125)) throw std::invalid_argument("phi_inv must lie in (0, 1/8]");
  if (labels < 2) throw std::invalid_argument("lowerbound_pm needs at least 2 labels");
  DistributionSpec d;
  d.family_ = DistFamily::lowerbound_pm;
  d.labels_ = labels;
  d.rho_ = rho;
  d.phi_inv_ = phi_inv;
  return d;
}

void DistributionSpec::eval_eta_into(double x, std::span<double> out) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("feature x must lie in [0,1]");
  switch (family_) {
    case DistFamily::two_label_linear:
      out[0] = 0.5 * (1.0 + x);
      out[1] = 0.5 * (1.0 - x);
      return;
    case DistFamily::topk_poly_margin: {
      double gap;
      if (alpha_ == 1.0) {
        gap = x;
      } else if (alpha_ == 2.0) {
        gap = std::sqrt(x);
      } else if (alpha_ == 0.5) {
        gap = x * x;
      } else {
        gap = std::pow(x, 1.0 / alpha_);
      }
      for (int l = 0; l < k_ - 1; ++l) out[static_cast<size_t>(l)] = 1.0;
      out[static_cast<size_t>(k_ - 1)] = 0.5 + 0.5 * gap;
      out[static_cast<size_t>(k_)] = 0.5 - 0.5 * gap;
      for (int l = k_ + 1; l < labels_; ++l) out[static_cast<size_t>(l)] = 0.0;
      return;
    }
    case DistFamily::beta_staircase: {
      double edge = 0.0;
      size_t j = 0;
      for (; j + 1 < cells_.size(); ++j) {
        edge += cells_[j].weight;
        if (x < edge) break;
      }
      const auto& c = cells_[j];
      for (int l = 0; l < labels_; ++l) {
        out[static_cast<size_t>(l)] = l < c.k ? c.eta_high : c.eta_low;
      }
      return;
    }
    case DistFamily::lowerbound_pm:
      out[0] = 0.75;
      out[1] = 0.25 - rho_ * phi_inv_;
      for (int l = 2; l < labels_; ++l) out[static_cast<size_t>(l)] = 0.0;
      return;
  }
}

ProbVector DistributionSpec::eval_eta(double x) const {
  std::vector<double> out(static_cast<size_t>(labels_));
  eval_eta_into(x, out);
  return ProbVector(std::move(out));
}

bool DistributionSpec::piecewise_constant() const {
  return family_ == DistFamily::beta_staircase || family_ == DistFamily::lowerbound_pm;
}

std::vector<std::pair<double, double>> DistributionSpec::quadrature_cells() const {
  if (!piecewise_constant()) {
    throw std::invalid_argument("quadrature cells exist only for piecewise-constant families");
  }
  if (family_ == DistFamily::lowerbound_pm) return {{1.0, 0.5}};
  std::vector<std::pair<double, double>> out;
  out.reserve(cells_.size());
  double edge = 0.0;
  for (const auto& c : cells_) {
    out.emplace_back(c.weight, edge + 0.5 * c.weight);
    edge += c.weight;
  }
  return out;
}

double DistributionSpec::sparsity_sup() const {
  switch (family_) {
    case DistFamily::two_label_linear:
      return 1.0;  // the two labels sum to 1 at every x
    case DistFamily::topk_poly_margin:
      return static_cast<double>(k_);  // (k-1) ones plus the straddling pair
    case DistFamily::beta_staircase: {
      double sup = 0.0;
      for (const auto& c : cells_) {
        sup = std::max(sup, c.k * c.eta_high + (labels_ - c.k) * c.eta_low);
      }
      return sup;
    }
    case DistFamily::lowerbound_pm:
      return 1.0 + (rho_ == -1 ? phi_inv_ : -phi_inv_);
  }
  return 0.0;
}

EstimatorSpec::EstimatorSpec(double gamma, double c0) : gamma(gamma), c0(c0) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and > 0");
  // c0 = 0 is allowed: it models the exact-recovery limit used in tests
  if (!(c0 >= 0.0) || !std::isfinite(c0)) throw std::invalid_argument("c0 must be finite and >= 0");
}

double EstimatorSpec::noise_scale(std::int64_t n_train) const {
  if (n_train < 1) throw std::invalid_argument("training size must be >= 1");
  return c0 * std::pow(static_cast<double>(n_train), -0.5 * gamma);
}

void validate_monte_carlo(const MonteCarloSpec& mc) {
  if (mc.samples < 1) throw std::invalid_argument("monte carlo sample count must be >= 1");
}

std::vector<Sample> sample_xy(const DistributionSpec& dist, const MonteCarloSpec& mc) {
  validate_monte_carlo(mc);
  Rng rng(derive_seed(mc.seed, 0x73616d706c65ULL));  // fixed salt: the xy-sampling stream
  const int L = dist.label_count();
  std::vector<double> eta(static_cast<size_t>(L));
  std::vector<Sample> out;
  out.reserve(static_cast<size_t>(mc.samples));
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    const double x = rng.uniform01();
    dist.eval_eta_into(x, eta);
    std::vector<std::uint8_t> bits(static_cast<size_t>(L));
    for (int l = 0; l < L; ++l) bits[static_cast<size_t>(l)] = rng.bernoulli(eta[static_cast<size_t>(l)]) ? 1 : 0;
    out.push_back(Sample{x, LabelVector(std::move(bits))});
  }
  return out;
}

void noisy_eta_into(std::span<const double> eta, double scale, Rng& rng, std::span<double> eta_hat) {
  if (scale == 0.0) {
    std::copy(eta.begin(), eta.end(), eta_hat.begin());
    return;
  }
  for (size_t l = 0; l < eta.size(); ++l) {
    const double v = eta[l] + scale * rng.normal();
    eta_hat[l] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
}

ProbVector noisy_eta(const DistributionSpec& dist, const EstimatorSpec& est, std::int64_t n_train,
                     double x, Rng& rng) {
  const int L = dist.label_count();
  std::vector<double> eta(static_cast<size_t>(L));
  dist.eval_eta_into(x, eta);
  std::vector<double> eta_hat(static_cast<size_t>(L));
  noisy_eta_into(eta, est.noise_scale(n_train), rng, eta_hat);
  return ProbVector(std::move(eta_hat));
}

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0,1]");
  // 0 log 0 = 0; a degenerate q mismatched with p yields +infinity via log
  const double t0 = p == 0.0 ? 0.0 : p * std::log(p / q);
  const double t1 = p == 1.0 ? 0.0 : (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return t0 + t1;
}

double choose_phi_inv(std::int64_t n, double tv_target) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  if (!(tv_target > 0.0) || !std::isfinite(tv_target)) throw std::invalid_argument("tv_target must be > 0");
  auto tv_bound = [n](double u) {
    return std::sqrt(0.5 * static_cast<double>(n) * kl_bernoulli(0.25 - u, 0.25 + u));
  };
  const double cap = 0.125;
  if (tv_bound(cap) <= tv_target) return cap;
  // tv_bound is increasing in u and 0 at u = 0; keep the invariant
  // tv_bound(lo) <= tv_target < tv_bound(hi). 200 halvings take the bracket
  // to adjacent doubles, far past the 1e-12 contract.
  double lo = 0.0;
  double hi = cap;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (tv_bound(mid) <= tv_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace sparselabel
