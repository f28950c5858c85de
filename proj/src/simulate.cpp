#include "wonham/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wonham {

int ChainPath::state_at(double t) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<size_t>(it - jump_times.begin())];
}

namespace {

// next state from row i of the generator (diagonal excluded)
int jump_target(const GeneratorMatrix& g, int i, RandomSource& src) {
  double weights[64];
  std::vector<double> big;
  double* w = weights;
  if (g.d > 64) {
    big.resize(static_cast<size_t>(g.d));
    w = big.data();
  }
  for (int j = 0; j < g.d; ++j) w[j] = (j == i) ? 0.0 : g.rates(i, j);
  return src.discrete(w, g.d);
}

}  // namespace

ChainPath sample_chain(const ModelSpec& spec, double t_end,
                       const RngStream& rng) {
  const GeneratorMatrix& g = spec.generator;
  if (t_end <= 0)
    throw Error(ErrorCode::DomainError, "sample_chain needs t_end > 0");
  for (int i = 0; i < g.d; ++i)
    if (g.rates(i, i) == 0.0)
      throw Error(ErrorCode::NonErgodic,
                  "state " + std::to_string(i + 1) + " is absorbing");

  RandomSource init_src(rng, RngPurpose::init);
  RandomSource chain_src(rng, RngPurpose::chain);

  ChainPath path;
  path.t_end = t_end;
  int state = init_src.discrete(spec.nu.data(), g.d);
  path.initial_state = state;
  path.states.push_back(state);

  double t = 0.0;
  for (;;) {
    t += chain_src.exponential(-g.rates(state, state));
    if (t > t_end) break;
    state = jump_target(g, state, chain_src);
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
  return path;
}

std::vector<double> step_drift_integrals(const ChainPath& path,
                                         const Eigen::VectorXd& h, double dt,
                                         int n_steps) {
  std::vector<double> out(static_cast<size_t>(n_steps), 0.0);
  const double grid_end = dt * n_steps;
  const size_t n_seg = path.states.size();
  for (size_t s = 0; s < n_seg; ++s) {
    double a = (s == 0) ? 0.0 : path.jump_times[s - 1];
    double b = (s + 1 < n_seg) ? path.jump_times[s] : path.t_end;
    b = std::min(b, grid_end);
    if (b <= a) continue;
    const double hv = h(path.states[s]);
    // distribute h * |segment| across the grid steps the segment overlaps
    int k0 = std::max(0, static_cast<int>(a / dt));
    for (int k = k0; k < n_steps; ++k) {
      double lo = std::max(a, dt * k);
      double hi = std::min(b, dt * (k + 1));
      if (hi > lo) out[static_cast<size_t>(k)] += hv * (hi - lo);
      if (dt * (k + 1) >= b) break;
    }
  }
  return out;
}

ObservationPath sample_observation(const ChainPath& path,
                                   const ModelSpec& spec, double dt,
                                   const RngStream& rng) {
  if (dt <= 0)
    throw Error(ErrorCode::DomainError, "sample_observation needs dt > 0");
  const int n = static_cast<int>(std::llround(path.t_end / dt));
  if (n < 1 || std::abs(n * dt - path.t_end) > 1e-6 * std::max(1.0, path.t_end))
    throw Error(ErrorCode::DomainError,
                "dt does not divide the chain horizon");

  RandomSource noise_src(rng, RngPurpose::noise);
  ObservationPath obs;
  obs.dt = dt;
  obs.increments = step_drift_integrals(path, spec.h, dt, n);
  const double scale = spec.sigma * std::sqrt(dt);
  for (double& dy : obs.increments) dy += scale * noise_src.normal();
  return obs;
}

double coupling_time(const ModelSpec& spec, const Eigen::VectorXd& nu2,
                     double t_max, const RngStream& rng, CouplingStart start) {
  const GeneratorMatrix& g = spec.generator;
  for (int i = 0; i < g.d; ++i)
    if (g.rates(i, i) == 0.0)
      throw Error(ErrorCode::NonErgodic,
                  "state " + std::to_string(i + 1) + " is absorbing");

  RandomSource init_src(rng, RngPurpose::init);
  RandomSource chain_src(rng, RngPurpose::chain);

  int x = init_src.discrete(spec.nu.data(), g.d);
  int y = (start == CouplingStart::same) ? x
                                         : init_src.discrete(nu2.data(), g.d);
  if (x == y) return 0.0;

  /* While the chains are apart they read disjoint rows of the shared jump
   * mechanism, so their moves are independent: the next event occurs at the
   * superposed rate and belongs to either chain in proportion to its own
   * total rate.  After the first meeting they read the same row and never
   * separate, so the search stops there. */
  double t = 0.0;
  for (;;) {
    const double rx = -g.rates(x, x);
    const double ry = -g.rates(y, y);
    t += chain_src.exponential(rx + ry);
    if (t > t_max) return std::numeric_limits<double>::infinity();
    if (chain_src.uniform() < rx / (rx + ry))
      x = jump_target(g, x, chain_src);
    else
      y = jump_target(g, y, chain_src);
    if (x == y) return t;
  }
}

}  // namespace wonham
