/*
 * End-to-end acceptance run.  Eleven numbered criteria cover the central
 * cross-validation (Monte Carlo stability index against the closed-form
 * 2-state quadrature), the Lyapunov-exponent estimator agreements, the
 * closed-form identities, the analytic-bound verdicts in three SNR
 * regimes, the coupling-tail rate, discretization convergence, and the
 * structural invariants of the filter implementation.
 *
 * Each criterion prints exactly one PASS/FAIL line with the measured
 * numbers and its wall time; the process exit status is the number of
 * failed criteria.  Nothing here is tuned at run time: every tolerance,
 * horizon, replication count and seed is pinned in this file.
 *
 * Runtime is dominated by criterion 1 (100 replications of a two-filter
 * run at horizon 200) and criterion 10 (300 replications filtered at
 * four step sizes on a shared observation record); about a minute total
 * on one core.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wonham/bounds.hpp"
#include "wonham/config.hpp"
#include "wonham/experiment.hpp"
#include "wonham/filter.hpp"
#include "wonham/lyapunov.hpp"
#include "wonham/model.hpp"
#include "wonham/rng.hpp"
#include "wonham/simulate.hpp"
#include "wonham/stats.hpp"
#include "wonham/twostate.hpp"

namespace {

using namespace wonham;

int g_failures = 0;

std::string num(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

void report(int criterion, bool pass, const std::string& detail,
            double seconds) {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << " criterion ";
  os.width(2);
  os << criterion << ": " << detail << "  [" << num(seconds, 3) << " s]";
  std::cout << os.str() << std::endl;
  if (!pass) ++g_failures;
}

void run_criterion(int criterion,
                   const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    auto r = body();
    pass = r.first;
    detail = r.second;
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("unexpected exception: ") + e.what();
  }
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  report(criterion, pass, detail, dt.count());
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ModelSpec three_state_spec(double sigma) {
  Eigen::MatrixXd off(3, 3);
  off << 0.0, 1.0, 0.3, 0.6, 0.0, 1.2, 0.8, 0.4, 0.0;
  ModelSpec spec;
  spec.generator = GeneratorMatrix::from_off_diagonal(off);
  spec.h.resize(3);
  spec.h << 1.0, -0.5, 0.25;
  spec.sigma = sigma;
  spec.nu = stationary_distribution(spec.generator).mu;
  return spec;
}

/* Composite fixed-order Gauss-Legendre oracle in the flattened variable
 * (x = (1+tanh u)/2), driven through the public density evaluation only;
 * independent of the adaptive quadrature inside the library. */
struct GaussLegendre {
  std::vector<double> node, weight;

  explicit GaussLegendre(int n) : node(n), weight(n) {
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[i] = x;
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

struct DensityMoments {
  double mass;    // integral of q-hat over (0,1)
  double mean_x;  // q-hat average of x
};

DensityMoments density_moments(const ModelSpec& spec) {
  const Density2D den = make_density(spec);
  static const GaussLegendre gl(20);
  const int panels = 240;
  const double lo = den.u_lo, hi = den.u_hi;
  const double pw = (hi - lo) / panels;

  double z = 0.0, mx = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * pw;
    for (std::size_t i = 0; i < gl.node.size(); ++i) {
      const double u = a + 0.5 * pw * (gl.node[i] + 1.0);
      const double x = 1.0 / (1.0 + std::exp(-2.0 * u));
      const double cosh_u = std::cosh(u);
      const double x1mx = 0.25 / (cosh_u * cosh_u);
      const double logjac = std::log(2.0 * x1mx);
      const double f = std::exp(den.log_eval(x) + logjac - den.peak_log) * 0.5 *
                       pw * gl.weight[i];
      if (!(f > 0.0)) continue;
      z += f;
      mx += f * x;
    }
  }
  const double mass = z * std::exp(den.peak_log - den.log_normalization);
  return {mass, mx / z};
}

// the 12-point spec grid shared by criteria 4 and 5
std::vector<ModelSpec> spec_grid() {
  const std::vector<std::pair<double, double>> rates = {{1, 1}, {2, 1}, {0.5, 2}};
  const std::vector<std::pair<double, double>> obs = {{1, -1}, {0.8, -0.4}};
  const std::vector<double> sigmas = {0.7, 1.6};
  std::vector<ModelSpec> specs;
  for (const auto& r : rates)
    for (const auto& o : obs)
      for (double s : sigmas)
        specs.push_back(make_two_state(r.first, r.second, o.first, o.second, s));
  return specs;
}

struct TwoFilterPools {
  LyapunovEstimate gamma;
  LyapunovEstimate wedge;
};

/* Shared replication kernel for the two-filter experiments: chain and
 * observations drawn from the replication's keyed stream, both filters on
 * the same record, slopes fitted past the burn-in. */
TwoFilterPools two_filter_mc(const ModelSpec& base, const Eigen::VectorXd& nu,
                             const Eigen::VectorXd& nu_bar, double dt,
                             double horizon, double burn, int reps,
                             std::uint64_t seed) {
  ModelSpec spec = base;
  spec.nu = nu;
  std::vector<LyapunovEstimate> gs, ws;
  gs.reserve(reps);
  ws.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const RngStream stream{seed, static_cast<std::uint64_t>(r)};
    const ChainPath chain = sample_chain(spec, horizon, stream);
    const ObservationPath obs = sample_observation(chain, spec, dt, stream);
    const TwoFilterRun run = run_two_filters(obs, spec, nu, nu_bar);
    gs.push_back(gamma_distance_slope(run, burn));
    ws.push_back(lambda_sum_wedge(run, burn));
  }
  return {pool(gs), pool(ws)};
}

// criteria 1, 2 and the benchmark leg of criterion 8 share these runs
std::optional<TwoFilterPools> g_benchmark_mc;

std::pair<bool, std::string> criterion_1() {
  const ModelSpec spec = benchmark_spec();
  const double gamma_q = gamma_quadrature(spec);
  g_benchmark_mc = two_filter_mc(spec, vec2(0.9, 0.1), vec2(0.1, 0.9), 1e-3,
                                 200.0, 20.0, 100, 101);
  const LyapunovEstimate& g = g_benchmark_mc->gamma;
  const double diff = std::abs(g.value - gamma_q);
  const double tol = std::max(0.10 * std::abs(gamma_q), 3.0 * g.std_error);
  const bool pass = diff <= tol;
  return {pass, "gamma MC " + num(g.value, 8) + " (SE " + num(g.std_error, 3) +
                    ", 100 reps) vs quadrature " + num(gamma_q, 10) +
                    ", |diff| " + num(diff, 3) + " <= max(10% rel, 3 SE) = " +
                    num(tol, 3)};
}

std::pair<bool, std::string> criterion_2() {
  if (!g_benchmark_mc) return {false, "benchmark runs unavailable"};
  const double closed = lambda_sum_closed_form(benchmark_spec());
  const LyapunovEstimate& w = g_benchmark_mc->wedge;
  const double diff = std::abs(w.value - closed);
  const bool pass =
      std::abs(closed - (-3.0)) <= 1e-12 && diff <= 0.05 * std::abs(closed);
  return {pass, "wedge slope " + num(w.value, 10) + " vs closed form " +
                    num(closed, 10) + ", |diff| " + num(diff, 3) +
                    " <= 5% = " + num(0.05 * std::abs(closed), 3)};
}

std::pair<bool, std::string> criterion_3() {
  const double dt = 1e-3, horizon = 200.0, burn = 20.0;
  const int reps = 10;
  bool pass = true;
  std::string detail;
  const double sigmas[] = {0.5, 1.0, 4.0};
  for (int si = 0; si < 3; ++si) {
    const double sigma = sigmas[si];
    const ModelSpec spec = make_two_state(1, 1, 1, -1, sigma);
    const double lam_q = lambda1_quadrature(spec);
    std::vector<LyapunovEstimate> ep, es, en;
    for (int r = 0; r < reps; ++r) {
      const RngStream stream{static_cast<std::uint64_t>(303 + si),
                             static_cast<std::uint64_t>(r)};
      const ChainPath chain = sample_chain(spec, horizon, stream);
      const ObservationPath obs = sample_observation(chain, spec, dt, stream);
      const FilterTrajectory traj = run_filter(obs, spec, spec.nu);
      ep.push_back(lambda1_fk_pathwise(traj, chain, burn));
      es.push_back(lambda1_fk_stationary(traj, spec, burn));
      en.push_back(lambda1_log_norm(traj, burn));
    }
    const LyapunovEstimate pools[] = {pool(ep), pool(es), pool(en)};
    double worst_pair = 0.0, worst_quad = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        const double gap = std::abs(pools[a].value - pools[b].value);
        const double lim = 3.0 * std::hypot(pools[a].std_error,
                                            pools[b].std_error);
        worst_pair = std::max(worst_pair, gap / lim);
        if (gap > lim) pass = false;
      }
      const double gap = std::abs(pools[a].value - lam_q);
      const double lim = 3.0 * pools[a].std_error;
      worst_quad = std::max(worst_quad, gap / lim);
      if (gap > lim) pass = false;
    }
    detail += (si ? "; " : "") + ("sigma " + num(sigma, 3)) +
              ": worst pair gap " + num(100.0 * worst_pair, 3) +
              "% of 3SE, worst vs quadrature " + num(100.0 * worst_quad, 3) +
              "%";
  }
  return {pass, detail};
}

std::pair<bool, std::string> criterion_4() {
  double worst = 0.0;
  for (const ModelSpec& spec : spec_grid()) {
    const double lhs = gamma_quadrature(spec);
    const double rhs =
        lambda_sum_closed_form(spec) - 2.0 * lambda1_quadrature(spec);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {worst <= 1e-8, "max |gamma - (lambda_sum - 2 lambda1)| over the "
                         "12-spec grid = " +
                             num(worst, 3) + " <= 1e-8"};
}

std::pair<bool, std::string> criterion_5() {
  double worst_mass = 0.0, worst_mean = 0.0, worst_flux = 0.0;
  for (const ModelSpec& spec : spec_grid()) {
    const DensityMoments m = density_moments(spec);
    const double l12 = spec.generator.rates(0, 1);
    const double l21 = spec.generator.rates(1, 0);
    const double mu1 = l21 / (l12 + l21);
    worst_mass = std::max(worst_mass, std::abs(m.mass - 1.0));
    worst_mean = std::max(worst_mean, std::abs(m.mean_x - mu1));
    worst_flux =
        std::max(worst_flux, fokker_planck_flux_residual(spec, 1000));
  }
  const bool pass =
      worst_mass <= 1e-6 && worst_mean <= 1e-6 && worst_flux <= 1e-6;
  return {pass, "12-spec grid: max |int q-hat - 1| " + num(worst_mass, 3) +
                    ", max |mean - mu_1| " + num(worst_mean, 3) +
                    ", max flux residual " + num(worst_flux, 3) +
                    ", all <= 1e-6"};
}

double gamma_equation_residual(const ModelSpec& spec,
                               const Eigen::MatrixXd& gamma) {
  const Eigen::MatrixXd& lam = spec.generator.rates;
  const Eigen::VectorXd mu = stationary_distribution(spec.generator).mu;
  const Eigen::MatrixXd q =
      Eigen::MatrixXd(mu.asDiagonal()) - mu * mu.transpose();
  const Eigen::VectorXd qh = q * spec.h;
  const Eigen::MatrixXd res =
      lam.transpose() * gamma + gamma * lam + qh * qh.transpose();
  return res.cwiseAbs().maxCoeff();
}

std::pair<bool, std::string> criterion_6() {
  const ModelSpec bench = benchmark_spec();
  const ModelSpec three = three_state_spec(1.0);
  const double r2 = gamma_equation_residual(bench,
                                            solve_gamma_lyapunov(bench).gamma);
  const double r3 = gamma_equation_residual(three,
                                            solve_gamma_lyapunov(three).gamma);
  const bool residual_ok = r2 <= 1e-10 && r3 <= 1e-10;

  const Eigen::MatrixXd gamma = solve_gamma_lyapunov(bench).gamma;
  const double half_quad = 0.5 * bench.h.dot(gamma * bench.h);
  const bool coeff_ok = std::abs(half_quad - 1.0 / 16.0) <= 1e-10;
  return {residual_ok && coeff_ok,
          "equation residuals " + num(r2, 3) + " (d=2), " + num(r3, 3) +
              " (d=3) <= 1e-10; (1/2) h'Gamma h = " + num(half_quad, 10) +
              " vs asserted 1/16 = 0.0625 +- 1e-10" +
              (coeff_ok ? "" : " (coefficient clause does not hold; the "
                               "measured value is 1/8)")};
}

std::pair<bool, std::string> criterion_7() {
  const ModelSpec spec = benchmark_spec();
  const int n_reps = 100000;
  const int n_max = 12;
  std::vector<long> survivors(n_max + 1, 0);
  for (int r = 0; r < n_reps; ++r) {
    const RngStream stream{707, static_cast<std::uint64_t>(r)};
    const double tau = coupling_time(spec, spec.nu, double(n_max) + 1.0,
                                     stream, CouplingStart::independent);
    for (int n = 1; n <= n_max; ++n)
      if (tau >= double(n)) ++survivors[n];
  }

  // log-tail regression over the entries with enough survivors for the
  // normal approximation; the slope SE comes from the delta method on the
  // per-point binomial variance
  std::vector<double> ns, ys, vars;
  for (int n = 1; n <= n_max; ++n) {
    const double s = double(survivors[n]);
    if (s < 50.0) continue;
    ns.push_back(double(n));
    ys.push_back(std::log(s / double(n_reps)));
    vars.push_back((double(n_reps) - s) / (double(n_reps) * s));
  }
  if (ns.size() < 2) return {false, "fewer than two usable tail points"};
  const double nbar = mean(ns);
  double sxx = 0.0;
  for (double n : ns) sxx += (n - nbar) * (n - nbar);
  double slope = 0.0, var_slope = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double w = (ns[i] - nbar) / sxx;
    slope += w * ys[i];
    var_slope += w * w * vars[i];
  }
  const double se = std::sqrt(var_slope);
  const double limit = std::log(coupling_rate(spec.generator)) + 3.0 * se;
  const bool pass = slope <= limit;
  return {pass, "tail slope " + num(slope, 6) + " (SE " + num(se, 3) + ", " +
                    num(double(ns.size()), 2) + " points, 1e5 reps) <= "
                    "log(coupling rate) + 3 SE = " +
                    num(limit, 6)};
}

std::pair<bool, std::string> criterion_8() {
  if (!g_benchmark_mc) return {false, "benchmark runs unavailable"};
  bool pass = true;
  std::string detail;

  // benchmark regime: every applicable verdict must pass
  {
    const ModelSpec spec = benchmark_spec();
    const auto verdicts = check_bound_consistency(
        {g_benchmark_mc->gamma}, compute_bounds(spec), spec);
    int applicable = 0;
    for (const auto& v : verdicts) {
      if (v.status == VerdictStatus::Skipped) continue;
      ++applicable;
      if (v.status != VerdictStatus::Pass) {
        pass = false;
        detail += v.name + " FAIL; ";
      }
    }
    detail += "sigma 1: " + num(double(applicable), 2) +
              " applicable verdicts pass";
  }

  // strong signal: sigma^2 gamma must sit in the [-2 +- 0.3] band
  {
    const ModelSpec spec = make_two_state(1, 1, 1, -1, 0.1);
    const TwoFilterPools p = two_filter_mc(spec, vec2(0.9, 0.1),
                                           vec2(0.1, 0.9), 1e-3, 13.0, 2.0, 6,
                                           808);
    const double scaled = spec.sigma * spec.sigma * p.gamma.value;
    const bool band = scaled >= -2.3 && scaled <= -1.7;
    const auto verdicts = check_bound_consistency(
        {p.gamma}, compute_bounds(spec), spec);
    bool verdict_pass = false;
    for (const auto& v : verdicts)
      if (v.name == "high_snr_band") verdict_pass = v.status == VerdictStatus::Pass;
    if (!(band && verdict_pass)) pass = false;
    detail += "; sigma 0.1: sigma^2 gamma = " + num(scaled, 6) +
              " in [-2.3, -1.7]" + (band && verdict_pass ? "" : " VIOLATED");
  }

  // weak signal: the spectral gap governs, within the stated 0.1 slack
  {
    const ModelSpec spec = make_two_state(1, 1, 1, -1, 10.0);
    const TwoFilterPools p = two_filter_mc(spec, vec2(0.9, 0.1),
                                           vec2(0.1, 0.9), 1e-3, 30.0, 10.0, 4,
                                           809);
    const BoundsReport report = compute_bounds(spec);
    const bool direct = p.gamma.value <= report.spectral + 0.1;
    const auto verdicts = check_bound_consistency({p.gamma}, report, spec);
    bool verdict_pass = false;
    for (const auto& v : verdicts)
      if (v.name == "spectral_low_snr")
        verdict_pass = v.status == VerdictStatus::Pass;
    if (!(direct && verdict_pass)) pass = false;
    detail += "; sigma 10: gamma " + num(p.gamma.value, 6) +
              " <= spectral + 0.1 = " + num(report.spectral + 0.1, 3) +
              (direct && verdict_pass ? "" : " VIOLATED");
  }
  return {pass, detail};
}

std::pair<bool, std::string> criterion_9() {
  double err[3];
  const double sigmas[3] = {5.0, 10.0, 20.0};
  for (int i = 0; i < 3; ++i) {
    const ModelSpec spec = make_two_state(1, 1, 1, -1, sigmas[i]);
    err[i] = std::abs(gamma_quadrature(spec) - gamma_expansion_low_snr(spec));
  }
  const double r1 = err[0] / err[1];
  const double r2 = err[1] / err[2];

  const ModelSpec strong = make_two_state(1, 1, 1, -1, 0.05);
  const double scaled =
      strong.sigma * strong.sigma * gamma_quadrature(strong);
  const double target = -0.5 * 4.0;  // -(h1-h2)^2/2
  const double rel = std::abs(scaled - target) / std::abs(target);

  const bool pass = r1 >= 16.0 && r2 >= 16.0 && rel <= 0.15;
  return {pass, "expansion error shrinks " + num(r1, 5) + "x and " +
                    num(r2, 5) + "x per sigma doubling (>= 16x); sigma^2 "
                    "gamma at 0.05 = " +
                    num(scaled, 6) + " vs " + num(target, 3) +
                    ", rel err " + num(rel, 3) + " <= 0.15"};
}

std::pair<bool, std::string> criterion_10() {
  const ModelSpec spec = make_two_state(1, 1, 1, -1, 0.25);
  const double gamma_q = gamma_quadrature(spec);
  const double lam_sum = lambda_sum_closed_form(spec);
  const Eigen::VectorXd nu0 = vec2(0.9, 0.1);
  const double horizon = 160.0, burn = 10.0, dt_fine = 5e-4;
  const int reps = 300;
  const int factors[4] = {8, 4, 2, 1};  // dt = 4e-3, 2e-3, 1e-3, 5e-4

  double sum_lam[4] = {0, 0, 0, 0};
  for (int r = 0; r < reps; ++r) {
    const RngStream stream{424242, static_cast<std::uint64_t>(r)};
    const ChainPath chain = sample_chain(spec, horizon, stream);
    const ObservationPath fine =
        sample_observation(chain, spec, dt_fine, stream);
    for (int i = 0; i < 4; ++i) {
      // block-summing the fine increments realizes the coarser grid on the
      // same chain and the same Brownian path, so successive levels differ
      // by discretization alone
      const int f = factors[i];
      ObservationPath obs;
      obs.dt = dt_fine * f;
      obs.increments.reserve(fine.increments.size() / f);
      for (std::size_t k = 0; k + f <= fine.increments.size(); k += f) {
        double s = 0.0;
        for (int j = 0; j < f; ++j) s += fine.increments[k + j];
        obs.increments.push_back(s);
      }
      const FilterTrajectory traj = run_filter(obs, spec, nu0);
      sum_lam[i] += lambda1_fk_stationary(traj, spec, burn).value;
    }
  }

  double gap[4];
  for (int i = 0; i < 4; ++i) {
    const double gamma_hat = lam_sum - 2.0 * (sum_lam[i] / reps);
    gap[i] = gamma_hat - gamma_q;
  }
  bool monotone = true;
  for (int i = 1; i < 4; ++i) {
    if (gap[i] * gap[0] <= 0.0) monotone = false;              // no crossing
    if (std::abs(gap[i]) >= std::abs(gap[i - 1])) monotone = false;
  }
  bool shrinking = true;
  for (int i = 2; i < 4; ++i)
    if (std::abs(gap[i] - gap[i - 1]) >= std::abs(gap[i - 1] - gap[i - 2]))
      shrinking = false;
  const bool pass = monotone && shrinking;
  return {pass, "gamma(dt) - quadrature at dt {4e-3, 2e-3, 1e-3, 5e-4} = {" +
                    num(gap[0], 4) + ", " + num(gap[1], 4) + ", " +
                    num(gap[2], 4) + ", " + num(gap[3], 4) +
                    "}: one-sided, |gap| strictly shrinking, successive "
                    "differences shrinking (300 paired reps)"};
}

// ---- criterion 11: structural invariants ---------------------------------

bool check_simplex(const std::vector<Eigen::VectorXd>& pis, double& worst_sum,
                   double& worst_neg) {
  bool ok = true;
  for (const auto& pi : pis) {
    worst_sum = std::max(worst_sum, std::abs(pi.sum() - 1.0));
    worst_neg = std::min(worst_neg, pi.minCoeff());
    if (pi.minCoeff() < 0.0 || std::abs(pi.sum() - 1.0) > 1e-12) ok = false;
  }
  return ok;
}

bool check_sandwich(const TwoFilterRun& run) {
  const std::vector<double> wedge = wedge_log_norm(run);
  bool ok = true;
  for (std::size_t k = 0; k < wedge.size(); ++k) {
    const double log_w = wedge[k] - run.primary.log_norm[k] -
                         run.alternate.log_norm[k] - run.log_dist[k];
    const double w = std::exp(log_w);
    if (!(0.5 * w <= 1.0 + 1e-12 && w >= 1.0 - 1e-12)) ok = false;
    if (run.log_dist[k] > std::log(1e-12)) {
      const double direct =
          (run.primary.pi[k] - run.alternate.pi[k]).lpNorm<1>();
      const double ratio = std::exp(wedge[k] - run.primary.log_norm[k] -
                                    run.alternate.log_norm[k]);
      if (!(0.5 * ratio <= direct * (1.0 + 1e-6) + 1e-15 &&
            direct <= ratio * (1.0 + 1e-6) + 1e-15))
        ok = false;
    }
  }
  return ok;
}

bool check_semiflow(const ModelSpec& spec, const Eigen::VectorXd& init,
                    std::uint64_t seed) {
  const double dt = 1e-3, horizon = 20.0;
  const RngStream stream{seed, 0};
  const ChainPath chain = sample_chain(spec, horizon, stream);
  const ObservationPath obs = sample_observation(chain, spec, dt, stream);
  const FilterTrajectory full = run_filter(obs, spec, init);

  const std::size_t half = obs.increments.size() / 2;
  ObservationPath first{dt, {obs.increments.begin(),
                             obs.increments.begin() + half}};
  ObservationPath second{dt, {obs.increments.begin() + half,
                              obs.increments.end()}};
  const FilterTrajectory a = run_filter(first, spec, init);
  const FilterTrajectory b = run_filter(second, spec, a.pi.back());

  for (std::size_t k = 0; k < b.pi.size(); ++k) {
    for (int i = 0; i < spec.d(); ++i)
      if (b.pi[k](i) != full.pi[half + k](i)) return false;  // bit equality
    const double expect = full.log_norm[half + k] - full.log_norm[half];
    if (std::abs(b.log_norm[k] - expect) >
        1e-12 * std::max(1.0, std::abs(expect)))
      return false;
  }
  return true;
}

bool check_ergodic_identity(double& mean_diff, double& se) {
  const ModelSpec spec = benchmark_spec();  // stationary start: nu = mu
  const double dt = 1e-3, horizon = 600.0;
  const RngStream stream{1101, 0};
  const ChainPath chain = sample_chain(spec, horizon, stream);
  const ObservationPath obs = sample_observation(chain, spec, dt, stream);
  const FilterTrajectory traj = run_filter(obs, spec, spec.nu);

  std::vector<double> diff;
  diff.reserve(obs.increments.size());
  for (std::size_t k = 0; k < obs.increments.size(); ++k) {
    const double ph = traj.pi[k].dot(spec.h);
    const double hx = spec.h(chain.state_at(double(k) * dt));
    diff.push_back(hx * ph - ph * ph);
  }
  mean_diff = mean(diff);
  se = batch_means_se(diff, 1000);
  return std::abs(mean_diff) <= 3.0 * se;
}

std::map<std::string, std::string> tree_bytes(
    const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    out[entry.path().filename().string()] = buf.str();
  }
  return out;
}

bool check_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "wonham_acceptance";
  fs::remove_all(root);

  ExperimentConfig cfg;
  cfg.spec = benchmark_spec();
  cfg.dt = 1e-3;
  cfg.horizon = 30.0;
  cfg.burn_in = 5.0;
  cfg.burn_in_defaulted = false;
  cfg.replications = 4;
  cfg.master_seed = 99;
  cfg.experiment = "lyapunov";

  const fs::path dirs[3] = {root / "a", root / "b", root / "c"};
  const int threads[3] = {1, 3, 3};
  for (int i = 0; i < 3; ++i) {
    cfg.outputs = dirs[i].string();
    run_experiment(cfg, threads[i]);
  }
  const auto a = tree_bytes(dirs[0]);
  const bool ok = a == tree_bytes(dirs[1]) && a == tree_bytes(dirs[2]) &&
                  !a.empty();
  fs::remove_all(root);
  return ok;
}

std::pair<bool, std::string> criterion_11() {
  const ModelSpec bench = benchmark_spec();
  const ModelSpec three = three_state_spec(1.0);
  Eigen::VectorXd three_alt(3);
  three_alt << 0.6, 0.3, 0.1;

  // shared two-filter runs for the simplex and sandwich checks
  const auto make_run = [](const ModelSpec& spec, const Eigen::VectorXd& nu,
                           const Eigen::VectorXd& nu_bar, std::uint64_t seed) {
    ModelSpec s = spec;
    s.nu = nu;
    const RngStream stream{seed, 0};
    const ChainPath chain = sample_chain(s, 30.0, stream);
    const ObservationPath obs = sample_observation(chain, s, 1e-3, stream);
    return run_two_filters(obs, s, nu, nu_bar);
  };
  const TwoFilterRun run2 =
      make_run(bench, vec2(0.9, 0.1), vec2(0.1, 0.9), 1102);
  const TwoFilterRun run3 = make_run(three, three.nu, three_alt, 1103);

  double worst_sum = 0.0, worst_neg = 0.0;
  bool simplex_ok = true;
  for (const auto* pis : {&run2.primary.pi, &run2.alternate.pi,
                          &run3.primary.pi, &run3.alternate.pi})
    simplex_ok = check_simplex(*pis, worst_sum, worst_neg) && simplex_ok;
  const bool sandwich_ok = check_sandwich(run2) && check_sandwich(run3);
  const bool semiflow_ok = check_semiflow(bench, vec2(0.9, 0.1), 1104) &&
                           check_semiflow(three, three.nu, 1105);
  double erg_mean = 0.0, erg_se = 0.0;
  const bool ergodic_ok = check_ergodic_identity(erg_mean, erg_se);
  const bool deterministic_ok = check_determinism();

  const bool pass = simplex_ok && sandwich_ok && semiflow_ok && ergodic_ok &&
                    deterministic_ok;
  return {pass,
          std::string("simplex ") + (simplex_ok ? "ok" : "VIOLATED") +
              " (max |sum-1| " + num(worst_sum, 3) + ", min coeff " +
              num(worst_neg, 3) + "); sandwich " +
              (sandwich_ok ? "ok" : "VIOLATED") + "; semiflow restart " +
              (semiflow_ok ? "bit-exact" : "VIOLATED") +
              "; ergodic-average identity diff " + num(erg_mean, 3) +
              " <= 3 SE = " + num(3.0 * erg_se, 3) +
              (ergodic_ok ? "" : " VIOLATED") + "; byte determinism " +
              (deterministic_ok ? "ok" : "VIOLATED")};
}

}  // namespace

int main() {
  std::cout << "filter-stability acceptance suite" << std::endl;
  run_criterion(1, criterion_1);
  run_criterion(2, criterion_2);
  run_criterion(3, criterion_3);
  run_criterion(4, criterion_4);
  run_criterion(5, criterion_5);
  run_criterion(6, criterion_6);
  run_criterion(7, criterion_7);
  run_criterion(8, criterion_8);
  run_criterion(9, criterion_9);
  run_criterion(10, criterion_10);
  run_criterion(11, criterion_11);
  if (g_failures == 0)
    std::cout << "all criteria passed" << std::endl;
  else
    std::cout << g_failures << " criterion(s) failed" << std::endl;
  return g_failures;
}
