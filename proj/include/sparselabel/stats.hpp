#pragma once

#include <span>

namespace sparselabel {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
  int n = 0;
};

// Ordinary least squares of y on x. Requires >= 2 points with non-constant x.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

}  // namespace sparselabel
