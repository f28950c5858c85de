#pragma once

#include <cstddef>
#include <vector>

namespace wonham {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;  // standard error of the slope
};

double mean(const std::vector<double>& x);

/* Standard error of the mean of a correlated stationary series by the
 * method of non-overlapping batch means.  Returns +inf when fewer than two
 * full batches fit. */
double batch_means_se(const std::vector<double>& x, std::size_t batch_len);

/* Least-squares line through (k*dt, y[k]) for k in [first, last).  The
 * slope standard error is taken from the spread of unit-batch increments
 * (y[k+m]-y[k])/(m*dt) with m = round(batch_time/dt), which respects the
 * serial correlation of log-additive functionals; plain OLS residual SEs
 * would understate it. */
SlopeFit fit_slope(const std::vector<double>& y, double dt, std::size_t first,
                   std::size_t last, double batch_time = 1.0);

}  // namespace wonham
