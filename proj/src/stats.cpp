#include "wonham/stats.hpp"

#include <cmath>
#include <limits>

namespace wonham {

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double batch_means_se(const std::vector<double>& x, std::size_t batch_len) {
  if (batch_len == 0) batch_len = 1;
  const std::size_t n_batches = x.size() / batch_len;
  if (n_batches < 2) return std::numeric_limits<double>::infinity();

  std::vector<double> batch(n_batches, 0.0);
  for (std::size_t j = 0; j < n_batches; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < batch_len; ++i) s += x[j * batch_len + i];
    batch[j] = s / static_cast<double>(batch_len);
  }
  const double m = mean(batch);
  double var = 0.0;
  for (double b : batch) var += (b - m) * (b - m);
  var /= static_cast<double>(n_batches - 1);
  return std::sqrt(var / static_cast<double>(n_batches));
}

SlopeFit fit_slope(const std::vector<double>& y, double dt, std::size_t first,
                   std::size_t last, double batch_time) {
  SlopeFit fit;
  if (last > y.size()) last = y.size();
  if (last < first + 2) {
    fit.se = std::numeric_limits<double>::infinity();
    return fit;
  }
  const std::size_t n = last - first;

  // OLS on the centered time axis
  const double tbar = dt * (static_cast<double>(first) +
                            0.5 * static_cast<double>(n - 1));
  double ybar = 0.0;
  for (std::size_t k = first; k < last; ++k) ybar += y[k];
  ybar /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double xc = dt * static_cast<double>(k) - tbar;
    sxy += xc * (y[k] - ybar);
    sxx += xc * xc;
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * tbar;

  std::size_t m = static_cast<std::size_t>(std::llround(batch_time / dt));
  if (m == 0) m = 1;
  const std::size_t n_inc = (n - 1) / m;
  if (n_inc < 2) {
    fit.se = std::numeric_limits<double>::infinity();
    return fit;
  }
  std::vector<double> inc(n_inc);
  for (std::size_t j = 0; j < n_inc; ++j)
    inc[j] = (y[first + (j + 1) * m] - y[first + j * m]) /
             (dt * static_cast<double>(m));
  const double im = mean(inc);
  double var = 0.0;
  for (double v : inc) var += (v - im) * (v - im);
  var /= static_cast<double>(n_inc - 1);
  fit.se = std::sqrt(var / static_cast<double>(n_inc));
  return fit;
}

}  // namespace wonham
