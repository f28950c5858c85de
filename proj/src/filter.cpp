#include "wonham/filter.hpp"

#include <cmath>
#include <limits>

namespace wonham {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

FilterStepper::FilterStepper(const ModelSpec& spec, double dt)
    : predictor_(expm(spec.generator.rates.transpose() * dt)),
      h_(spec.h),
      inv_s2_(1.0 / (spec.sigma * spec.sigma)),
      dt_(dt) {
  if (dt <= 0) throw Error(ErrorCode::DomainError, "filter step needs dt > 0");
}

void FilterStepper::weights(double d_y, Eigen::VectorXd& psi,
                            double& shift) const {
  const int d = static_cast<int>(h_.size());
  psi.resize(d);
  shift = kNegInf;
  for (int i = 0; i < d; ++i) {
    psi(i) = h_(i) * d_y * inv_s2_ - 0.5 * h_(i) * h_(i) * dt_ * inv_s2_;
    shift = std::max(shift, psi(i));
  }
  // shifting by the maximum exponent keeps at least one weight at 1, so the
  // corrected mass can never underflow to zero
  for (int i = 0; i < d; ++i) psi(i) = std::exp(psi(i) - shift);
}

double FilterStepper::step_weighted(Eigen::VectorXd& pi,
                                    const Eigen::VectorXd& psi) const {
  const int d = static_cast<int>(pi.size());
  Eigen::VectorXd p = predictor_ * pi;
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    p(i) *= psi(i);
    total += p(i);
  }
  pi = p / total;
  return total;
}

double FilterStepper::step(Eigen::VectorXd& pi, double d_y) const {
  Eigen::VectorXd psi;
  double shift = 0.0;
  weights(d_y, psi, shift);
  return std::log(step_weighted(pi, psi)) + shift;
}

std::pair<Eigen::VectorXd, double> filter_step(const Eigen::VectorXd& pi,
                                               double d_y, double dt,
                                               const ModelSpec& spec) {
  FilterStepper stepper(spec, dt);
  Eigen::VectorXd out = pi;
  double inc = stepper.step(out, d_y);
  return {out, inc};
}

FilterTrajectory run_filter(const ObservationPath& obs, const ModelSpec& spec,
                            const Eigen::VectorXd& init) {
  FilterStepper stepper(spec, obs.dt);
  FilterTrajectory traj;
  traj.dt = obs.dt;
  traj.spec = spec;
  traj.pi.reserve(obs.increments.size() + 1);
  traj.log_norm.reserve(obs.increments.size() + 1);

  Eigen::VectorXd pi = init;
  double log_norm = 0.0;
  traj.pi.push_back(pi);
  traj.log_norm.push_back(log_norm);
  for (double d_y : obs.increments) {
    log_norm += stepper.step(pi, d_y);
    traj.pi.push_back(pi);
    traj.log_norm.push_back(log_norm);
  }
  return traj;
}

/* Both filters apply one linear map per step, M = diag(psi) exp(Lambda' dt),
 * followed by l1 normalization.  Writing pi_bar = pi + exp(l) * delta with
 * delta of unit l1 norm and zero sum, one step maps the pair to
 *
 *   pi'    = M pi / n0,                              n0 = |M pi|_1,
 *   delta' = (M delta - s pi') / (n0 + exp(l) s),    s  = 1' M delta,
 *   l'     = l + log |delta'|_1,   delta' renormalized.
 *
 * The identity is algebraically exact -- no linearization in exp(l) -- and
 * never subtracts two nearly equal filter states, so l keeps full relative
 * accuracy at depths where a direct |pi - pi_bar| would have underflowed or
 * lost every digit. */
TwoFilterRun run_two_filters(const ObservationPath& obs, const ModelSpec& spec,
                             const Eigen::VectorXd& nu,
                             const Eigen::VectorXd& nu_bar) {
  FilterStepper stepper(spec, obs.dt);
  const std::size_t n = obs.increments.size();

  TwoFilterRun run;
  run.primary.dt = run.alternate.dt = obs.dt;
  run.primary.spec = run.alternate.spec = spec;
  run.log_dist.reserve(n + 1);
  run.gap_dir.reserve(n + 1);

  Eigen::VectorXd pi = nu;
  Eigen::VectorXd delta = nu_bar - nu;
  double gap_log = kNegInf;
  const double gap0 = delta.cwiseAbs().sum();
  if (gap0 > 0.0) {
    gap_log = std::log(gap0);
    delta /= gap0;
  } else {
    delta.setZero();
  }

  double log_norm = 0.0, log_norm_bar = 0.0;
  auto record = [&]() {
    run.primary.pi.push_back(pi);
    run.primary.log_norm.push_back(log_norm);
    Eigen::VectorXd pi_bar = pi;
    if (std::isfinite(gap_log)) {
      pi_bar += std::exp(gap_log) * delta;
      // the reconstruction can pick up a roundoff-level negative entry once
      // the gap is near machine epsilon relative to pi
      pi_bar = pi_bar.cwiseMax(0.0);
      pi_bar /= pi_bar.sum();
    }
    run.alternate.pi.push_back(pi_bar);
    run.alternate.log_norm.push_back(log_norm_bar);
    run.log_dist.push_back(gap_log);
    run.gap_dir.push_back(delta);
  };
  record();

  Eigen::VectorXd psi, u;
  for (std::size_t k = 0; k < n; ++k) {
    double shift = 0.0;
    stepper.weights(obs.increments[k], psi, shift);

    if (std::isfinite(gap_log)) {
      u.noalias() = stepper.predictor() * delta;
      u.array() *= psi.array();
      const double s = u.sum();

      const double n0 = stepper.step_weighted(pi, psi);
      log_norm += std::log(n0) + shift;

      const double denom = n0 + std::exp(gap_log) * s;
      log_norm_bar += std::log(denom) + shift;
      u = (u - s * pi) / denom;
      u.array() -= u.mean();  // project roundoff off the zero-sum plane
      const double scale = u.cwiseAbs().sum();
      if (scale > 0.0) {
        gap_log += std::log(scale);
        delta = u / scale;
      } else {
        gap_log = kNegInf;
        delta.setZero();
      }
    } else {
      const double n0 = stepper.step_weighted(pi, psi);
      log_norm += std::log(n0) + shift;
      log_norm_bar = log_norm;
    }
    record();
  }
  return run;
}

std::vector<double> wedge_log_norm(const TwoFilterRun& run) {
  const std::size_t n = run.log_dist.size();
  std::vector<double> out(n, kNegInf);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(run.log_dist[k])) continue;
    const Eigen::VectorXd& x = run.primary.pi[k];
    const Eigen::VectorXd& g = run.gap_dir[k];
    const int d = static_cast<int>(x.size());
    // pi wedge pi_bar = exp(log_dist) * (pi wedge delta); the norm sums
    // |minor| over both orders of every index pair
    double wedge = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) wedge += std::abs(x(i) * g(j) - x(j) * g(i));
    if (wedge > 0.0)
      out[k] = run.primary.log_norm[k] + run.alternate.log_norm[k] +
               run.log_dist[k] + std::log(wedge);
  }
  return out;
}

}  // namespace wonham
