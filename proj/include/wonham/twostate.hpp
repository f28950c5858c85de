#pragma once

#include <Eigen/Dense>

#include "wonham/model.hpp"

namespace wonham {

/* Stationary density of the 2-state filter coordinate x = pi(1):
 *
 *   q(x) = x^-2 (1-x)^-2 exp(E(x)),
 *   E(x) = (2 sigma^2/(h1-h2)^2) [ -l21/(x(1-x))
 *                                  + (l21-l12)(log(x/(1-x)) + 1/(1-x)) ],
 *
 * held in log space together with the clipped quadrature window in the
 * transformed variable u, x = (1+tanh u)/2, and the log of the
 * normalization.  q spans hundreds of orders of magnitude across the SNR
 * range, so Z itself may not be representable while log Z always is. */
struct Density2D {
  ModelSpec spec;
  double quad_tolerance = 0.0;
  double log_normalization = 0.0;  // log of Z = integral of q over (0,1)
  double u_lo = 0.0;               // window where the transformed integrand
  double u_hi = 0.0;               //   is above the underflow clip level
  double peak_log = 0.0;           // max-shift used inside the window

  double log_eval(double x) const;    // log q(x); -inf outside (0,1)
  double eval(double x) const;        // q(x); may underflow to 0 harmlessly
  double normalized(double x) const;  // q(x)/Z, stable at any scale
};

Density2D make_density(const ModelSpec& spec, double quad_tol = 1e-12);

// point evaluation of the closed-form density (unnormalized)
double density_eval(const ModelSpec& spec, double x);

// stability index gamma = -(l12+l21) + ((h1-h2)^2/sigma^2) (-1/2 + m) with
// m the q-average of x(1-x), by clipped adaptive quadrature
double gamma_quadrature(const ModelSpec& spec);

// top exponent lambda1 = (1/(2 sigma^2)) * q-average of (x h1 + (1-x) h2)^2
double lambda1_quadrature(const ModelSpec& spec);

// lambda1 + lambda2 = -(l12+l21) + sigma^-2 ((h1+h2) mu(h) - h1^2/2 - h2^2/2)
double lambda_sum_closed_form(const ModelSpec& spec);

// weak-signal expansion of gamma through the sigma^-4 term
double gamma_expansion_low_snr(const ModelSpec& spec);

/* Strong-signal expansion of gamma; the two displayed terms only, valid as
 * an asymptotic statement for sigma << 1.  regime_valid flags sigma < 1. */
struct HighSnrExpansion {
  double value = 0.0;
  bool regime_valid = false;
};
HighSnrExpansion gamma_expansion_high_snr(const ModelSpec& spec);

// strong-signal expansion of lambda1 (any d); requires pairwise-distinct h
double lambda1_refined_expansion(const ModelSpec& spec);

/* Solution of 0 = Lambda' Gamma + Gamma Lambda + Q h h' Q with
 * Q = diag(mu) - mu mu', pinned to total sum zero (the kernel direction
 * mu mu' is excluded by that constraint). */
struct GammaLyapunovSolution {
  Eigen::MatrixXd gamma;
};
GammaLyapunovSolution solve_gamma_lyapunov(const ModelSpec& spec);

/* Max over an n-point grid of the stationary forward-equation flux
 * b q_hat - (a q_hat)'/2 evaluated with 4th-order differences, normalized
 * by the largest |b| q_hat on the grid.  A transcription error in q shows
 * up here at O(1). */
double fokker_planck_flux_residual(const ModelSpec& spec, int n_grid);

// the gamma-quad experiment row: closed forms plus a consistency-based
// error estimate |gamma - (lambda_sum - 2 lambda1)|
struct TwoStateQuadratureResult {
  double gamma = 0.0;
  double lambda1 = 0.0;
  double lambda_sum = 0.0;
  double quad_error = 0.0;
};
TwoStateQuadratureResult two_state_report(const ModelSpec& spec);

}  // namespace wonham
