#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wonham/errors.hpp"
#include "wonham/tolerances.hpp"

namespace wonham {

/* Transition-intensity matrix of the signal chain: off-diagonal rates
 * lambda_ij >= 0 (units 1/time), rows summing to zero. */
struct GeneratorMatrix {
  int d = 0;
  Eigen::MatrixXd rates;  // d x d

  GeneratorMatrix() = default;
  explicit GeneratorMatrix(const Eigen::MatrixXd& m)
      : d(static_cast<int>(m.rows())), rates(m) {}

  // build from off-diagonal rates only; diagonal derived as -row-sum
  static GeneratorMatrix from_off_diagonal(const Eigen::MatrixXd& off);
};

/* One filtering problem instance: chain generator, observation levels h,
 * noise intensity sigma, and the initial law nu on the d-simplex. */
struct ModelSpec {
  GeneratorMatrix generator;
  Eigen::VectorXd h;
  double sigma = 1.0;
  Eigen::VectorXd nu;

  int d() const { return generator.d; }
};

struct StationaryDistribution {
  Eigen::VectorXd mu;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

// structural checks; reports rather than throws
ValidationReport validate(const ModelSpec& spec,
                          const Tolerances& tol = default_tolerances());

// true when the zero eigenvalue is simple and exp(Lambda) is entrywise positive
bool is_ergodic(const GeneratorMatrix& g,
                const Tolerances& tol = default_tolerances());

// direct solve of mu' Lambda = 0 with the normalization row appended
StationaryDistribution stationary_distribution(
    const GeneratorMatrix& g, const Tolerances& tol = default_tolerances());

// gamma_max(Lambda): largest non-zero real part among the eigenvalues
double spectral_gap(const GeneratorMatrix& g,
                    const Tolerances& tol = default_tolerances());

// exp(Lambda t) by scaling-and-squaring with a degree-13 Pade approximant
Eigen::MatrixXd matrix_exponential(const GeneratorMatrix& g, double t);

// generic dense expm, shared with the filter's predictor construction
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

// r = 1 - sum_i min_{k != l} G_ki G_li with G = exp(Lambda)
double coupling_rate(const GeneratorMatrix& g,
                     const Tolerances& tol = default_tolerances());

// convenience constructors used across tests and experiments
ModelSpec make_two_state(double l12, double l21, double h1, double h2,
                         double sigma);
ModelSpec benchmark_spec();  // Lambda=[[-1,1],[1,-1]], h=(1,-1), sigma=1

}  // namespace wonham
