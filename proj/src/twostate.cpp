#include "wonham/twostate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wonham/quadrature.hpp"

namespace wonham {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kClipDrop = 360.0;  // exp(-360) is half of log(DBL_MIN)

double softplus(double t) {
  return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

struct TwoStateParams {
  double l12, l21, h1, h2, sigma, dh, kcoef;
};

TwoStateParams unpack(const ModelSpec& spec, bool need_dh) {
  if (spec.d() != 2)
    throw Error(ErrorCode::DomainError, "closed forms require d = 2");
  TwoStateParams p;
  p.l12 = spec.generator.rates(0, 1);
  p.l21 = spec.generator.rates(1, 0);
  p.h1 = spec.h(0);
  p.h2 = spec.h(1);
  p.sigma = spec.sigma;
  p.dh = p.h1 - p.h2;
  if (need_dh && p.dh == 0.0)
    throw Error(ErrorCode::DegenerateObservation,
                "h1 = h2: the filter coordinate has no stationary density");
  p.kcoef = need_dh ? 2.0 * p.sigma * p.sigma / (p.dh * p.dh) : 0.0;
  return p;
}

/* Log of the quadrature integrand in the flattened variable u, where
 * x = (1 + tanh u)/2:
 *
 *   G(u) = log q(x(u)) + log(2 x(1-x))
 *        = K(-l12 e^{2u} - l21 e^{-2u} - (l12+l21) + 2u(l21-l12))
 *          + softplus(2u) + softplus(-2u) + log 2.
 *
 * The regrouping gives each exponential a single sign, so there is no
 * cancellation at any u; both essential endpoint singularities turn into
 * clean exponential decay. */
double transformed_log_integrand(const TwoStateParams& p, double u) {
  const double e2u = std::exp(2.0 * u);
  const double em2u = std::exp(-2.0 * u);
  return p.kcoef * (-p.l12 * e2u - p.l21 * em2u - (p.l12 + p.l21) +
                    2.0 * u * (p.l21 - p.l12)) +
         softplus(2.0 * u) + softplus(-2.0 * u) + std::log(2.0);
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// outward bisection for the u where G crosses level, from a bracket
double find_crossing(const TwoStateParams& p, double inside, double outside,
                     double level) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (transformed_log_integrand(p, mid) >= level)
      inside = mid;
    else
      outside = mid;
  }
  return outside;
}

struct Window {
  double u_lo, u_hi, u_peak, peak;
};

Window locate_window(const TwoStateParams& p, double drop) {
  // coarse + center-refined scan; the density's peaks sit within |u| < 10
  // for any reachable parameter set, the refined band resolves the narrow
  // large-sigma peak at u = 0
  std::vector<double> grid;
  grid.reserve(3700);
  for (int i = 0; i <= 1600; ++i) grid.push_back(-40.0 + 0.05 * i);
  for (int i = 0; i <= 2000; ++i) grid.push_back(-2.5 + 0.0025 * i);
  std::sort(grid.begin(), grid.end());

  double peak = kNegInf;
  std::size_t peak_idx = 0;
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = transformed_log_integrand(p, grid[i]);
    if (vals[i] > peak) {
      peak = vals[i];
      peak_idx = i;
    }
  }

  const double level = peak - drop;
  std::size_t lo = peak_idx;
  while (lo > 0 && vals[lo] >= level) --lo;
  std::size_t hi = peak_idx;
  while (hi + 1 < grid.size() && vals[hi] >= level) ++hi;

  Window w;
  w.peak = peak;
  w.u_peak = grid[peak_idx];
  w.u_lo = (vals[lo] >= level) ? grid[lo]
                               : find_crossing(p, grid[lo + 1], grid[lo], level);
  w.u_hi = (vals[hi] >= level) ? grid[hi]
                               : find_crossing(p, grid[hi - 1], grid[hi], level);
  return w;
}

// integral of w(x(u)) exp(G(u) - shift) over the window
double window_integral(const TwoStateParams& p, const Window& w, double shift,
                       double quad_tol,
                       const std::function<double(double, double)>& weight) {
  auto f = [&](double u) {
    const double g = transformed_log_integrand(p, u);
    const double x = logistic(2.0 * u);
    const double x1mx = 0.25 / std::pow(std::cosh(u), 2);
    return weight(x, x1mx) * std::exp(g - shift);
  };
  // Integrate the two flanks of the peak separately.  With the peak as a
  // panel endpoint no Simpson node can coincide with it, which would
  // otherwise fool the rough pass whenever the weight vanishes exactly
  // there (the h-average weight does at the symmetric point).
  const double span = w.u_hi - w.u_lo;
  const double rough =
      adaptive_simpson(f, w.u_lo, w.u_peak, 0.5e-4 * span) +
      adaptive_simpson(f, w.u_peak, w.u_hi, 0.5e-4 * span);
  // floor the target at integration noise so an underestimated rough pass
  // can never demand sub-roundoff accuracy
  const double noise_floor = 4.0 * std::numeric_limits<double>::epsilon() * span;
  const double tol = std::max(quad_tol * std::abs(rough), noise_floor);
  return adaptive_simpson(f, w.u_lo, w.u_peak, 0.5 * tol) +
         adaptive_simpson(f, w.u_peak, w.u_hi, 0.5 * tol);
}

struct Moments {
  double mean_x;    // q-average of x
  double mean_mid;  // q-average of x(1-x)
  double mean_h2;   // q-average of (x h1 + (1-x) h2)^2
  double log_z;     // log of the q normalization
};

Moments compute_moments(const ModelSpec& spec, double quad_tol) {
  const TwoStateParams p = unpack(spec, true);
  const Window w = locate_window(p, kClipDrop);
  auto one = [](double, double) { return 1.0; };
  auto xw = [](double x, double) { return x; };
  auto midw = [](double, double x1mx) { return x1mx; };
  auto h2w = [&](double x, double) {
    const double v = x * p.h1 + (1.0 - x) * p.h2;
    return v * v;
  };
  const double z = window_integral(p, w, w.peak, quad_tol, one);
  Moments m;
  m.mean_x = window_integral(p, w, w.peak, quad_tol, xw) / z;
  m.mean_mid = window_integral(p, w, w.peak, quad_tol, midw) / z;
  m.mean_h2 = window_integral(p, w, w.peak, quad_tol, h2w) / z;
  m.log_z = w.peak + std::log(z);
  return m;
}

}  // namespace

double Density2D::log_eval(double x) const {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  const TwoStateParams p = unpack(spec, true);
  const double expo =
      p.kcoef * (-p.l21 / (x * (1.0 - x)) +
                 (p.l21 - p.l12) * (std::log(x / (1.0 - x)) + 1.0 / (1.0 - x)));
  return expo - 2.0 * std::log(x) - 2.0 * std::log(1.0 - x);
}

double Density2D::eval(double x) const { return std::exp(log_eval(x)); }

double Density2D::normalized(double x) const {
  return std::exp(log_eval(x) - log_normalization);
}

Density2D make_density(const ModelSpec& spec, double quad_tol) {
  const TwoStateParams p = unpack(spec, true);
  Density2D den;
  den.spec = spec;
  den.quad_tolerance = quad_tol;
  const Window w = locate_window(p, kClipDrop);
  den.u_lo = w.u_lo;
  den.u_hi = w.u_hi;
  den.peak_log = w.peak;
  auto one = [](double, double) { return 1.0; };
  const double z = window_integral(p, w, w.peak, quad_tol, one);
  den.log_normalization = w.peak + std::log(z);
  return den;
}

double density_eval(const ModelSpec& spec, double x) {
  if (!(x > 0.0 && x < 1.0))
    throw Error(ErrorCode::DomainError, "density argument must lie in (0,1)");
  Density2D den;
  den.spec = spec;
  return den.eval(x);
}

double gamma_quadrature(const ModelSpec& spec) {
  const TwoStateParams p = unpack(spec, true);
  const Moments m = compute_moments(spec, 1e-12);
  return -(p.l12 + p.l21) +
         p.dh * p.dh / (p.sigma * p.sigma) * (-0.5 + m.mean_mid);
}

double lambda1_quadrature(const ModelSpec& spec) {
  const TwoStateParams p = unpack(spec, true);
  const Moments m = compute_moments(spec, 1e-12);
  return m.mean_h2 / (2.0 * p.sigma * p.sigma);
}

double lambda_sum_closed_form(const ModelSpec& spec) {
  const TwoStateParams p = unpack(spec, false);
  const double l = p.l12 + p.l21;
  const double mu1 = p.l21 / l;
  const double mu2 = p.l12 / l;
  const double muh = mu1 * p.h1 + mu2 * p.h2;
  return -l + ((p.h1 + p.h2) * muh - 0.5 * p.h1 * p.h1 - 0.5 * p.h2 * p.h2) /
                  (p.sigma * p.sigma);
}

double gamma_expansion_low_snr(const ModelSpec& spec) {
  const TwoStateParams p = unpack(spec, false);
  const double l = p.l12 + p.l21;
  const double mu1 = p.l21 / l;
  const double mu2 = p.l12 / l;
  const double s2 = p.sigma * p.sigma;
  const double second = -0.5 * (p.h1 * p.h1 + p.h2 * p.h2) +
                        (mu2 * p.h1 + mu1 * p.h2) * (mu1 * p.h1 + mu2 * p.h2);
  const double fourth = -std::pow(p.dh, 4) * mu1 * mu1 * mu2 * mu2 / (2.0 * l);
  return -l + second / s2 + fourth / (s2 * s2);
}

HighSnrExpansion gamma_expansion_high_snr(const ModelSpec& spec) {
  const TwoStateParams p = unpack(spec, true);
  HighSnrExpansion out;
  out.regime_valid = p.sigma < 1.0;
  const double s2 = p.sigma * p.sigma;
  out.value = -0.5 * p.dh * p.dh / s2 +
              std::log(1.0 / s2) * 2.0 * p.l12 * p.l21 / (p.l12 + p.l21);
  return out;
}

double lambda1_refined_expansion(const ModelSpec& spec) {
  const int d = spec.d();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (spec.h(i) == spec.h(j))
        throw Error(ErrorCode::NotApplicable,
                    "strong-signal expansion needs pairwise-distinct h");
  const Eigen::VectorXd mu = stationary_distribution(spec.generator).mu;
  const double s2 = spec.sigma * spec.sigma;
  double mu_h2 = 0.0, mu_exit = 0.0;
  for (int i = 0; i < d; ++i) {
    mu_h2 += mu(i) * spec.h(i) * spec.h(i);
    mu_exit += mu(i) * std::abs(spec.generator.rates(i, i));
  }
  return 0.5 * mu_h2 / s2 - std::log(1.0 / s2) * mu_exit;
}

GammaLyapunovSolution solve_gamma_lyapunov(const ModelSpec& spec) {
  const int d = spec.d();
  const Eigen::VectorXd mu = stationary_distribution(spec.generator).mu;
  const Eigen::MatrixXd q =
      Eigen::MatrixXd(mu.asDiagonal()) - mu * mu.transpose();
  const Eigen::VectorXd qh = q * spec.h;
  const Eigen::MatrixXd source = qh * qh.transpose();
  const Eigen::MatrixXd& lam = spec.generator.rates;

  // vec(Lambda' G + G Lambda) = (I (x) Lambda' + Lambda' (x) I) vec(G); the
  // normalization row sum_ij G_ij = 0 excludes the kernel direction mu mu'
  const int n = d * d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (int col = 0; col < d; ++col)
    for (int row = 0; row < d; ++row) {
      const int eq = col * d + row;
      for (int k = 0; k < d; ++k) {
        a(eq, col * d + k) += lam(k, row);  // (Lambda' G)_{row,col}
        a(eq, k * d + row) += lam(k, col);  // (G Lambda)_{row,col}
      }
      b(eq) = -source(row, col);
    }
  a.row(n).setOnes();

  Eigen::VectorXd g = a.colPivHouseholderQr().solve(b);
  GammaLyapunovSolution sol;
  sol.gamma = Eigen::Map<Eigen::MatrixXd>(g.data(), d, d);
  sol.gamma = 0.5 * (sol.gamma + sol.gamma.transpose()).eval();
  return sol;
}

double fokker_planck_flux_residual(const ModelSpec& spec, int n_grid) {
  const TwoStateParams p = unpack(spec, true);
  const Density2D den = make_density(spec);
  // evaluate where the density carries numerically meaningful mass
  const Window seen = locate_window(p, 60.0);

  const double l = p.l12 + p.l21;
  const double diff_coef = p.dh * p.dh / (p.sigma * p.sigma);
  auto drift = [&](double x) { return p.l21 - l * x; };
  auto diffused = [&](double x) {
    const double xx = x * (1.0 - x);
    return diff_coef * xx * xx * den.normalized(x);
  };

  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    const double u = seen.u_lo + (seen.u_hi - seen.u_lo) * (i + 0.5) /
                                     static_cast<double>(n_grid);
    const double x = logistic(2.0 * u);
    const double step = 2.5e-4 * std::min({1.0, 4.0 * x, 4.0 * (1.0 - x)});
    const double deriv =
        (-diffused(x + 2.0 * step) + 8.0 * diffused(x + step) -
         8.0 * diffused(x - step) + diffused(x - 2.0 * step)) /
        (12.0 * step);
    const double flux = drift(x) * den.normalized(x) - 0.5 * deriv;
    worst = std::max(worst, std::abs(flux));
    scale = std::max(scale, std::abs(drift(x)) * den.normalized(x));
  }
  return worst / scale;
}

TwoStateQuadratureResult two_state_report(const ModelSpec& spec) {
  TwoStateQuadratureResult out;
  const TwoStateParams p = unpack(spec, true);
  const Moments m = compute_moments(spec, 1e-12);
  out.gamma = -(p.l12 + p.l21) +
              p.dh * p.dh / (p.sigma * p.sigma) * (-0.5 + m.mean_mid);
  out.lambda1 = m.mean_h2 / (2.0 * p.sigma * p.sigma);
  out.lambda_sum = lambda_sum_closed_form(spec);
  out.quad_error = std::abs(out.gamma - (out.lambda_sum - 2.0 * out.lambda1));
  return out;
}

}  // namespace wonham
