#include "wonham/lyapunov.hpp"

#include <cmath>
#include <limits>

#include "wonham/errors.hpp"
#include "wonham/stats.hpp"

namespace wonham {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct StepWindow {
  std::size_t first;  // first step index past burn-in
  double burn_in;
  double horizon;
};

// resolve the default burn-in lazily so specs with a degenerate generator
// (used with an explicit burn-in) never touch the spectral gap
StepWindow step_window(const ModelSpec& spec, double dt, std::size_t n_steps,
                       double burn_in, double min_window = 0.0) {
  if (burn_in < 0.0) burn_in = default_burn_in(spec);
  const double horizon = dt * static_cast<double>(n_steps);
  const auto first = static_cast<std::size_t>(std::llround(burn_in / dt));
  if (first >= n_steps)
    throw Error(ErrorCode::InsufficientHorizon,
                "burn-in consumes the whole trajectory");
  const double window = horizon - dt * static_cast<double>(first);
  if (window < min_window)
    throw Error(ErrorCode::InsufficientHorizon,
                "post burn-in window shorter than required");
  return {first, dt * static_cast<double>(first), horizon};
}

LyapunovEstimate average_estimate(const std::vector<double>& terms,
                                  const StepWindow& w, double dt,
                                  EstimatorMethod method) {
  LyapunovEstimate est;
  est.value = mean(terms);
  const auto batch = static_cast<std::size_t>(std::llround(1.0 / dt));
  est.std_error = batch_means_se(terms, batch > 0 ? batch : 1);
  est.horizon = w.horizon;
  est.burn_in = w.burn_in;
  est.method = method;
  return est;
}

LyapunovEstimate slope_estimate(const std::vector<double>& y, double dt,
                                const StepWindow& w, EstimatorMethod method) {
  const SlopeFit fit = fit_slope(y, dt, w.first, y.size() - 1);
  LyapunovEstimate est;
  est.value = fit.slope;
  est.std_error = fit.se;
  est.horizon = w.horizon;
  est.burn_in = w.burn_in;
  est.method = method;
  return est;
}

bool coincident(const TwoFilterRun& run) {
  return run.log_dist.empty() || run.log_dist.front() == kNegInf;
}

}  // namespace

const char* estimator_method_name(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::fk_pathwise: return "fk_pathwise";
    case EstimatorMethod::fk_stationary: return "fk_stationary";
    case EstimatorMethod::log_norm_slope: return "log_norm_slope";
    case EstimatorMethod::wedge_slope: return "wedge_slope";
    case EstimatorMethod::distance_slope: return "distance_slope";
  }
  return "unknown";
}

double default_burn_in(const ModelSpec& spec) {
  return 10.0 / std::abs(spectral_gap(spec.generator));
}

LyapunovEstimate lambda1_fk_pathwise(const FilterTrajectory& traj,
                                     const ChainPath& chain, double burn_in) {
  const std::size_t n = traj.log_norm.size() - 1;
  const StepWindow w = step_window(traj.spec, traj.dt, n, burn_in);
  const double inv_s2 = 1.0 / (traj.spec.sigma * traj.spec.sigma);
  const std::vector<double> drift =
      step_drift_integrals(chain, traj.spec.h, traj.dt, static_cast<int>(n));

  std::vector<double> terms;
  terms.reserve(n - w.first);
  for (std::size_t k = w.first; k < n; ++k) {
    const double ph = traj.pi[k].dot(traj.spec.h);
    const double hbar = drift[k] / traj.dt;
    terms.push_back(inv_s2 * (ph * hbar - 0.5 * ph * ph));
  }
  return average_estimate(terms, w, traj.dt, EstimatorMethod::fk_pathwise);
}

LyapunovEstimate lambda1_fk_stationary(const FilterTrajectory& traj,
                                       const ModelSpec& spec, double burn_in) {
  const std::size_t n = traj.log_norm.size() - 1;
  const StepWindow w = step_window(spec, traj.dt, n, burn_in);
  const double half_inv_s2 = 0.5 / (spec.sigma * spec.sigma);

  std::vector<double> terms;
  terms.reserve(n - w.first);
  for (std::size_t k = w.first; k < n; ++k) {
    const double ph = traj.pi[k].dot(spec.h);
    terms.push_back(half_inv_s2 * ph * ph);
  }
  return average_estimate(terms, w, traj.dt, EstimatorMethod::fk_stationary);
}

LyapunovEstimate lambda1_log_norm(const FilterTrajectory& traj,
                                  double burn_in) {
  const std::size_t n = traj.log_norm.size() - 1;
  const StepWindow w = step_window(traj.spec, traj.dt, n, burn_in);
  return slope_estimate(traj.log_norm, traj.dt, w,
                        EstimatorMethod::log_norm_slope);
}

LyapunovEstimate lambda_sum_wedge(const TwoFilterRun& run, double burn_in) {
  if (coincident(run))
    throw Error(ErrorCode::DegenerateWedge,
                "wedge vanishes for coincident initial laws");
  const std::vector<double> w_log = wedge_log_norm(run);
  const std::size_t n = w_log.size() - 1;
  const StepWindow w =
      step_window(run.primary.spec, run.primary.dt, n, burn_in);
  return slope_estimate(w_log, run.primary.dt, w, EstimatorMethod::wedge_slope);
}

LyapunovEstimate gamma_distance_slope(const TwoFilterRun& run,
                                      double burn_in) {
  if (coincident(run))
    throw Error(ErrorCode::DegenerateRun,
                "distance is identically zero for coincident initial laws");
  const std::size_t n = run.log_dist.size() - 1;
  const StepWindow w =
      step_window(run.primary.spec, run.primary.dt, n, burn_in, 10.0);
  return slope_estimate(run.log_dist, run.primary.dt, w,
                        EstimatorMethod::distance_slope);
}

LyapunovEstimate pool(const std::vector<LyapunovEstimate>& estimates) {
  if (estimates.empty())
    throw Error(ErrorCode::DomainError, "cannot pool zero estimates");
  if (estimates.size() == 1) return estimates.front();

  LyapunovEstimate out = estimates.front();
  const auto r = static_cast<double>(estimates.size());
  double sum = 0.0;
  for (const auto& e : estimates) sum += e.value;
  out.value = sum / r;
  double ss = 0.0;
  for (const auto& e : estimates) {
    const double d = e.value - out.value;
    ss += d * d;
  }
  out.std_error = std::sqrt(ss / (r - 1.0) / r);
  out.replications = static_cast<int>(estimates.size());
  return out;
}

}  // namespace wonham
