#pragma once

#include <utility>
#include <vector>

namespace rigidlim {

/// Least-squares line through (log x, log y).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Ordinary least squares on (log eps, log value). Needs at least 3 pairs with
/// strictly positive entries.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& pairs);

/// Composite trapezoid rule over samples (t_k, f_k), returning the running integral.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f);

}  // namespace rigidlim
