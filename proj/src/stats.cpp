#include "sparselabel/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace sparselabel {

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_fit: mismatched lengths");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw std::invalid_argument("ols_fit: need at least 2 points");

  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[static_cast<size_t>(i)];
    my += y[static_cast<size_t>(i)];
  }
  mx /= n;
  my /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<size_t>(i)] - mx;
    const double dy = y[static_cast<size_t>(i)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_fit: x values are all equal");

  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  const double rss = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  fit.stderr_slope = n > 2 ? std::sqrt(rss / ((n - 2) * sxx)) : 0.0;
  return fit;
}

}  // namespace sparselabel
