#pragma once

#include <string>
#include <vector>

#include "wonham/filter.hpp"
#include "wonham/model.hpp"
#include "wonham/simulate.hpp"

namespace wonham {

/*
 * Estimators for the top Lyapunov exponent of the unnormalized filter,
 * the sum of the first two exponents, and the stability index gamma.
 *
 * Three independent routes to lambda1 are kept side by side on purpose:
 * a pathwise time-average that uses the hidden chain, a stationary
 * average that only needs the filter trajectory, and the regression
 * slope of the log normalizer.  They agree in distribution but carry
 * different finite-horizon bias and variance, which is exactly what the
 * cross-checks exercise.
 */

enum class EstimatorMethod {
  fk_pathwise,
  fk_stationary,
  log_norm_slope,
  wedge_slope,
  distance_slope,
};

const char* estimator_method_name(EstimatorMethod method);

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double horizon = 0.0;
  double burn_in = 0.0;
  EstimatorMethod method = EstimatorMethod::log_norm_slope;
  int replications = 1;
};

// transient allowance: ten mixing times of the signal chain
double default_burn_in(const ModelSpec& spec);

// time-average of sigma^-2 (pi(h) hbar - pi(h)^2 / 2) along the true chain
LyapunovEstimate lambda1_fk_pathwise(const FilterTrajectory& traj,
                                     const ChainPath& chain,
                                     double burn_in = -1.0);

// stationary form: time-average of pi(h)^2 / (2 sigma^2)
LyapunovEstimate lambda1_fk_stationary(const FilterTrajectory& traj,
                                       const ModelSpec& spec,
                                       double burn_in = -1.0);

// regression slope of the accumulated log normalizer
LyapunovEstimate lambda1_log_norm(const FilterTrajectory& traj,
                                  double burn_in = -1.0);

// slope of the wedge log norm: lambda1 + lambda2 for d = 2, an upper
// growth rate for d > 2
LyapunovEstimate lambda_sum_wedge(const TwoFilterRun& run,
                                  double burn_in = -1.0);

// slope of log ||pi - pi_bar||_1; the filter stability index
LyapunovEstimate gamma_distance_slope(const TwoFilterRun& run,
                                      double burn_in = -1.0);

// replication pooling: mean across estimates, spread-based SE
LyapunovEstimate pool(const std::vector<LyapunovEstimate>& estimates);

}  // namespace wonham
