#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wonham/model.hpp"
#include "wonham/rng.hpp"

namespace wonham {

/* Piecewise-constant sample path of the signal chain on [0, t_end].
 * states[0] holds on [0, jump_times[0]); states[k] on
 * [jump_times[k-1], jump_times[k]); the path is cadlag. */
struct ChainPath {
  double t_end = 0.0;
  int initial_state = 0;
  std::vector<double> jump_times;  // strictly increasing, in (0, t_end]
  std::vector<int> states;         // length = jump_times.size() + 1

  int state_at(double t) const;
};

/* Observation increments dY_k on a uniform grid of step dt. */
struct ObservationPath {
  double dt = 0.0;
  std::vector<double> increments;

  double horizon() const { return dt * static_cast<double>(increments.size()); }
};

// whether the second chain of a coupled pair starts from its own draw or
// from the first chain's initial state
enum class CouplingStart { independent, same };

// exact continuous-time sampling: initial state ~ nu, exponential holding
// times, jump j with probability lambda_ij / (-lambda_ii)
ChainPath sample_chain(const ModelSpec& spec, double t_end,
                       const RngStream& rng);

// dY_k = int h(X_s) ds over step k (exact piecewise integration against the
// jump times) + sigma * sqrt(dt) * xi_k
ObservationPath sample_observation(const ChainPath& path,
                                   const ModelSpec& spec, double dt,
                                   const RngStream& rng);

// exact per-step integrals int_{k dt}^{(k+1) dt} h(X_s) ds, k < n_steps;
// shared by observation synthesis and the pathwise estimators
std::vector<double> step_drift_integrals(const ChainPath& path,
                                         const Eigen::VectorXd& h, double dt,
                                         int n_steps);

// first meeting time of two chains driven by a shared jump mechanism
// (independent moves while apart, merged forever after meeting); returns
// +infinity when they have not met by t_max
double coupling_time(const ModelSpec& spec, const Eigen::VectorXd& nu2,
                     double t_max, const RngStream& rng,
                     CouplingStart start = CouplingStart::independent);

}  // namespace wonham
