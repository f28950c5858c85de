#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "wonham/model.hpp"
#include "wonham/simulate.hpp"

namespace wonham {

/* One conditional-distribution trajectory pi_k at times k*dt together with
 * the accumulated log of the unnormalized-filter mass, log_norm[k]. */
struct FilterTrajectory {
  double dt = 0.0;
  std::vector<Eigen::VectorXd> pi;   // pi[0] is the initial condition
  std::vector<double> log_norm;      // log_norm[0] = 0
  ModelSpec spec;
};

/* Two filters driven by the same observation record, started from nu and
 * nu_bar.  log_dist[k] = log of the l1 distance |pi_k - pi_bar_k|; the unit
 * direction of the difference is kept in gap_dir so the distance remains
 * meaningful far below the underflow threshold of a direct subtraction. */
struct TwoFilterRun {
  FilterTrajectory primary;
  FilterTrajectory alternate;
  std::vector<double> log_dist;             // -inf when nu == nu_bar
  std::vector<Eigen::VectorXd> gap_dir;     // l1-normalized, zero-sum
};

/* Precomputed one-step transition: exponential-predictor followed by the
 * exact Gaussian likelihood correction and renormalization.  Keeps the
 * iterate on the simplex by construction at any step size. */
class FilterStepper {
public:
  FilterStepper(const ModelSpec& spec, double dt);

  // advance pi in place; returns the log increment of the unnormalized mass
  double step(Eigen::VectorXd& pi, double d_y) const;

  // likelihood weights exp(e_i - shift) for one increment, shift = max e_i
  void weights(double d_y, Eigen::VectorXd& psi, double& shift) const;

  // advance pi with precomputed weights; returns |diag(psi) P pi|_1
  double step_weighted(Eigen::VectorXd& pi, const Eigen::VectorXd& psi) const;

  const Eigen::MatrixXd& predictor() const { return predictor_; }

private:
  Eigen::MatrixXd predictor_;  // exp(Lambda' dt)
  Eigen::VectorXd h_;
  double inv_s2_ = 0.0;
  double dt_ = 0.0;
};

// single step from scratch (predictor matrix rebuilt); returns (pi', log inc)
std::pair<Eigen::VectorXd, double> filter_step(const Eigen::VectorXd& pi,
                                               double d_y, double dt,
                                               const ModelSpec& spec);

FilterTrajectory run_filter(const ObservationPath& obs, const ModelSpec& spec,
                            const Eigen::VectorXd& init);

TwoFilterRun run_two_filters(const ObservationPath& obs, const ModelSpec& spec,
                             const Eigen::VectorXd& nu,
                             const Eigen::VectorXd& nu_bar);

/* log |rho_k wedge rho_bar_k| where the wedge norm is the l1 norm over all
 * ordered index pairs of the 2x2 minors; assembled from the stored log
 * masses, gap direction and gap magnitude, so it stays finite long after
 * pi and pi_bar coincide to machine precision. */
std::vector<double> wedge_log_norm(const TwoFilterRun& run);

}  // namespace wonham
