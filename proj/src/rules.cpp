#include "sparselabel/rules.hpp"

#include <cmath>
#include <stdexcept>

namespace sparselabel {

RuleSpec RuleSpec::TopK(int k) {
  if (k < 0) throw std::invalid_argument("top_k rule needs k >= 0");
  RuleSpec r;
  r.kind = RuleKind::top_k;
  r.k = k;
  return r;
}

RuleSpec RuleSpec::BetaBudget(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta budget must be finite and >= 0");
  RuleSpec r;
  r.kind = RuleKind::beta_budget;
  r.beta = beta;
  return r;
}

RuleSpec RuleSpec::Mixed(double beta, int k) {
  if (k < 0) throw std::invalid_argument("mixed rule needs k >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta budget must be finite and >= 0");
  RuleSpec r;
  r.kind = RuleKind::mixed;
  r.k = k;
  r.beta = beta;
  return r;
}

RuleSpec RuleSpec::Full() { return RuleSpec{}; }

void RuleSpec::validate_for(int label_count) const {
  if ((kind == RuleKind::top_k || kind == RuleKind::mixed) && k > label_count) {
    throw std::invalid_argument("rule parameter k exceeds the label count");
  }
}

std::string RuleSpec::describe() const {
  switch (kind) {
    case RuleKind::top_k: return "top_k(k=" + std::to_string(k) + ")";
    case RuleKind::beta_budget: return "beta_budget(beta=" + format_double(beta) + ")";
    case RuleKind::mixed: return "mixed(beta=" + format_double(beta) + ",k=" + std::to_string(k) + ")";
    case RuleKind::full: return "full";
  }
  return "?";
}

namespace {

LabelVector select_prefix(const ProbVector& v, int count) {
  std::vector<std::int32_t> order(static_cast<size_t>(v.size()));
  rank_descending_into(v.span(), order);
  std::vector<std::uint8_t> bits(static_cast<size_t>(v.size()), 0);
  for (int j = 0; j < count; ++j) bits[static_cast<size_t>(order[static_cast<size_t>(j)])] = 1;
  return LabelVector(std::move(bits));
}

}  // namespace

LabelVector top_k_classify(const ProbVector& v, int k) {
  if (k < 0 || k > v.size()) throw std::invalid_argument("k must lie in 0..L");
  return select_prefix(v, k);
}

int beta_threshold_ranked(std::span<const double> v, std::span<const std::int32_t> order,
                          double beta) {
  double cost = 0.0;
  int m = 0;
  for (size_t j = 0; j < order.size(); ++j) {
    cost += 1.0 - v[static_cast<size_t>(order[j])];
    if (cost > beta) break;
    m = static_cast<int>(j) + 1;
  }
  return m;
}

int beta_threshold(const ProbVector& v, double beta) {
  if (!(beta >= 0.0) || std::isnan(beta)) throw std::invalid_argument("beta budget must be >= 0");
  std::vector<std::int32_t> order(static_cast<size_t>(v.size()));
  rank_descending_into(v.span(), order);
  return beta_threshold_ranked(v.span(), order, beta);
}

LabelVector beta_classify(const ProbVector& v, double beta) {
  return select_prefix(v, beta_threshold(v, beta));
}

LabelVector mixed_classify(const ProbVector& v, double beta, int k) {
  if (k < 0 || k > v.size()) throw std::invalid_argument("k must lie in 0..L");
  return select_prefix(v, std::min(beta_threshold(v, beta), k));
}

LabelVector apply_rule(const ProbVector& v, const RuleSpec& rule) {
  rule.validate_for(v.size());
  switch (rule.kind) {
    case RuleKind::top_k: return top_k_classify(v, rule.k);
    case RuleKind::beta_budget: return beta_classify(v, rule.beta);
    case RuleKind::mixed: return mixed_classify(v, rule.beta, rule.k);
    case RuleKind::full: return LabelVector::ones(v.size());
  }
  throw std::logic_error("unreachable rule kind");
}

OracleResult brute_force_oracle(const ProbVector& v, const RuleSpec& rule) {
  const int n = v.size();
  if (n > 20) throw std::invalid_argument("brute_force_oracle supports at most 20 labels");
  rule.validate_for(n);

  const std::uint32_t mask_count = 1u << n;
  bool found = false;
  double best_fn = 0.0;
  std::uint32_t best_mask = 0;

  // lexicographic comparison of bit sequences (bit 0 first, 0 before 1)
  auto lex_less = [n](std::uint32_t a, std::uint32_t b) {
    for (int i = 0; i < n; ++i) {
      const std::uint32_t ai = (a >> i) & 1u;
      const std::uint32_t bi = (b >> i) & 1u;
      if (ai != bi) return ai < bi;
    }
    return false;
  };

  for (std::uint32_t mask = 0; mask < mask_count; ++mask) {
    int on = 0;
    double fn = 0.0;
    double fp = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) {
        ++on;
        fp += 1.0 - v[i];
      } else {
        fn += v[i];
      }
    }
    bool feasible = true;
    switch (rule.kind) {
      case RuleKind::top_k: feasible = on <= rule.k; break;
      case RuleKind::beta_budget: feasible = fp <= rule.beta; break;
      case RuleKind::mixed: feasible = on <= rule.k && fp <= rule.beta; break;
      case RuleKind::full: feasible = true; break;
    }
    if (!feasible) continue;
    if (!found || fn < best_fn || (fn == best_fn && lex_less(mask, best_mask))) {
      found = true;
      best_fn = fn;
      best_mask = mask;
    }
  }

  // the empty decision vector is always feasible, so a minimizer exists
  std::vector<std::uint8_t> bits(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) bits[static_cast<size_t>(i)] = static_cast<std::uint8_t>((best_mask >> i) & 1u);
  return OracleResult{LabelVector(std::move(bits)), best_fn};
}

}  // namespace sparselabel
