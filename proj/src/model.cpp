#include "wonham/model.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace wonham {

GeneratorMatrix GeneratorMatrix::from_off_diagonal(const Eigen::MatrixXd& off) {
  GeneratorMatrix g;
  g.d = static_cast<int>(off.rows());
  g.rates = off;
  for (int i = 0; i < g.d; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.d; ++j)
      if (j != i) row += off(i, j);
    g.rates(i, i) = -row;
  }
  return g;
}

ValidationReport validate(const ModelSpec& spec, const Tolerances& tol) {
  ValidationReport report;
  auto fail = [&](const std::string& msg) {
    report.valid = false;
    report.errors.push_back(msg);
  };

  const auto& g = spec.generator;
  if (g.d < 2) fail("state count d must be >= 2");
  if (g.rates.rows() != g.d || g.rates.cols() != g.d)
    fail("generator matrix is not d x d");
  for (int i = 0; i < g.d; ++i) {
    double row = 0.0;
    for (int j = 0; j < g.d; ++j) {
      row += g.rates(i, j);
      if (j != i && g.rates(i, j) < 0) {
        std::ostringstream oss;
        oss << "negative off-diagonal rate lambda(" << i + 1 << "," << j + 1
            << ") = " << g.rates(i, j);
        fail(oss.str());
      }
    }
    if (std::abs(row) > tol.structural) {
      std::ostringstream oss;
      oss << "row " << i + 1 << " of the generator sums to " << row;
      fail(oss.str());
    }
  }

  if (spec.h.size() != g.d) fail("observation vector h has wrong length");
  if (!(spec.sigma > 0)) fail("sigma must be > 0");

  if (spec.nu.size() != g.d) {
    fail("initial distribution nu has wrong length");
  } else {
    double total = 0.0;
    for (int i = 0; i < g.d; ++i) {
      if (spec.nu(i) < -tol.structural) fail("nu has a negative entry");
      total += spec.nu(i);
    }
    if (std::abs(total - 1.0) > tol.structural) fail("nu does not sum to 1");
  }

  if (g.d == 2 && spec.h.size() == 2 && spec.h(0) == spec.h(1))
    report.warnings.push_back("dh=0: 2-state closed form undefined");

  return report;
}

bool is_ergodic(const GeneratorMatrix& g, const Tolerances& tol) {
  if (g.d < 2) return false;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(g.rates);
  int zero_count = 0;
  for (int i = 0; i < g.d; ++i) {
    if (std::abs(solver.eigenvalues()(i)) < 1e-9) ++zero_count;
  }
  if (zero_count != 1) return false;
  Eigen::MatrixXd p = expm(g.rates);
  return (p.array() > tol.positivity).all();
}

StationaryDistribution stationary_distribution(const GeneratorMatrix& g,
                                               const Tolerances& tol) {
  if (!is_ergodic(g, tol))
    throw Error(ErrorCode::NonErgodic,
                "stationary distribution requires an ergodic generator");

  // balance equations Lambda' mu = 0 with the normalization row appended
  Eigen::MatrixXd a(g.d + 1, g.d);
  a.topRows(g.d) = g.rates.transpose();
  a.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.d + 1);
  b(g.d) = 1.0;
  Eigen::VectorXd mu = a.colPivHouseholderQr().solve(b);

  double residual = (g.rates.transpose() * mu).cwiseAbs().maxCoeff();
  if (residual > tol.algebraic || (mu.array() <= 0).any())
    throw Error(ErrorCode::NonErgodic,
                "balance equations have no positive solution");
  mu /= mu.sum();
  return {mu};
}

double spectral_gap(const GeneratorMatrix& g, const Tolerances& tol) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(g.rates);
  int zero_count = 0;
  double gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.d; ++i) {
    std::complex<double> ev = solver.eigenvalues()(i);
    if (std::abs(ev) < 1e-9) {
      ++zero_count;
    } else {
      gap = std::max(gap, ev.real());
    }
  }
  if (zero_count != 1)
    throw Error(ErrorCode::NonErgodic, "zero eigenvalue is not simple");
  (void)tol;
  return gap;
}

/* Scaling-and-squaring with the degree-13 diagonal Pade approximant
 * (coefficients and the theta_13 threshold from Higham's expm analysis);
 * for the generators here (d <= ~10, moderate norms) this is accurate to
 * close to machine precision. */
Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  static const double pade13[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const double theta13 = 5.371920351148152;

  const int n = static_cast<int>(a.rows());
  double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  int squarings = 0;
  if (norm > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
  Eigen::MatrixXd as = a / std::pow(2.0, squarings);

  Eigen::MatrixXd a2 = as * as;
  Eigen::MatrixXd a4 = a2 * a2;
  Eigen::MatrixXd a6 = a2 * a4;
  Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd u =
      as * (a6 * (pade13[13] * a6 + pade13[11] * a4 + pade13[9] * a2) +
            pade13[7] * a6 + pade13[5] * a4 + pade13[3] * a2 +
            pade13[1] * ident);
  Eigen::MatrixXd v =
      a6 * (pade13[12] * a6 + pade13[10] * a4 + pade13[8] * a2) +
      pade13[6] * a6 + pade13[4] * a4 + pade13[2] * a2 + pade13[0] * ident;

  Eigen::MatrixXd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Eigen::MatrixXd matrix_exponential(const GeneratorMatrix& g, double t) {
  if (t < 0)
    throw Error(ErrorCode::DomainError, "matrix exponential needs t >= 0");
  if (t == 0) return Eigen::MatrixXd::Identity(g.d, g.d);
  return expm(g.rates * t);
}

double coupling_rate(const GeneratorMatrix& g, const Tolerances& tol) {
  Eigen::MatrixXd p = matrix_exponential(g, 1.0);
  if (!(p.array() > tol.positivity).all())
    throw Error(ErrorCode::NonErgodic,
                "embedded chain exp(Lambda) is not entrywise positive");
  double overlap = 0.0;
  for (int i = 0; i < g.d; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.d; ++k)
      for (int l = 0; l < g.d; ++l)
        if (k != l) best = std::min(best, p(k, i) * p(l, i));
    overlap += best;
  }
  return 1.0 - overlap;
}

ModelSpec make_two_state(double l12, double l21, double h1, double h2,
                         double sigma) {
  ModelSpec spec;
  Eigen::MatrixXd rates(2, 2);
  rates << -l12, l12, l21, -l21;
  spec.generator = GeneratorMatrix(rates);
  spec.h.resize(2);
  spec.h << h1, h2;
  spec.sigma = sigma;
  spec.nu = stationary_distribution(spec.generator).mu;
  return spec;
}

ModelSpec benchmark_spec() { return make_two_state(1, 1, 1, -1, 1); }

}  // namespace wonham
