#include "wonham/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wonham/errors.hpp"

namespace wonham {

namespace {

std::string describe(double estimate, double limit) {
  std::ostringstream os;
  os.precision(17);
  os << "estimate " << estimate << " vs limit " << limit;
  return os.str();
}

ConsistencyVerdict inequality_verdict(const std::string& name, double estimate,
                                      double limit) {
  ConsistencyVerdict v;
  v.name = name;
  v.status = estimate <= limit ? VerdictStatus::Pass : VerdictStatus::Fail;
  v.details = describe(estimate, limit);
  return v;
}

ConsistencyVerdict skipped_verdict(const std::string& name,
                                   const std::string& why) {
  ConsistencyVerdict v;
  v.name = name;
  v.status = VerdictStatus::Skipped;
  v.details = why;
  return v;
}

}  // namespace

const char* verdict_status_name(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Pass: return "PASS";
    case VerdictStatus::Fail: return "FAIL";
    case VerdictStatus::Skipped: return "SKIPPED";
  }
  return "unknown";
}

BoundsReport compute_bounds(const ModelSpec& spec) {
  if (!is_ergodic(spec.generator))
    throw Error(ErrorCode::NonErgodic, "bounds require an ergodic generator");

  const int d = spec.d();
  const Eigen::MatrixXd& lam = spec.generator.rates;
  const Eigen::VectorXd mu = stationary_distribution(spec.generator).mu;

  BoundsReport report;

  double min_geo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      min_geo = std::min(min_geo, std::sqrt(lam(i, j) * lam(j, i)));
  report.az = -2.0 * min_geo;
  report.bcl_rate = report.az;

  double weighted = 0.0;
  for (int i = 0; i < d; ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j)
      if (j != i) row_min = std::min(row_min, lam(i, j));
    weighted += mu(i) * row_min;
  }
  report.mu_min = -weighted;

  report.spectral = spectral_gap(spec.generator);

  double azu = 0.0, azl = 0.0;
  for (int j = 0; j < d; ++j) {
    double nearest = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      if (i == j) continue;
      const double diff = spec.h(j) - spec.h(i);
      nearest = std::min(nearest, diff * diff);
      total += diff * diff;
    }
    azu += mu(j) * nearest;
    azl += mu(j) * total;
  }
  report.azu_limit = -0.5 * azu;
  report.azl_limit = -0.5 * azl;

  return report;
}

std::vector<ConsistencyVerdict> check_bound_consistency(
    const std::vector<LyapunovEstimate>& estimates, const BoundsReport& report,
    const ModelSpec& spec) {
  const LyapunovEstimate* gamma = nullptr;
  for (const auto& e : estimates)
    if (e.method == EstimatorMethod::distance_slope) gamma = &e;

  std::vector<ConsistencyVerdict> verdicts;
  if (gamma == nullptr) {
    verdicts.push_back(
        skipped_verdict("az", "no distance-slope estimate supplied"));
    return verdicts;
  }

  const double g = gamma->value;
  const double se3 = 3.0 * gamma->std_error;
  const double sigma = spec.sigma;

  if (report.az == 0.0)
    verdicts.push_back(
        skipped_verdict("az", "vacuous: some reciprocal rate pair is zero"));
  else
    verdicts.push_back(inequality_verdict("az", g, report.az + se3));

  verdicts.push_back(inequality_verdict("mu_min", g, report.mu_min + se3));

  if (sigma >= 10.0) {
    // the spectral comparison is an asymptotic statement; allow an
    // explicit O(sigma^-2) slack on top of the statistical margin
    const double slack = 10.0 / (sigma * sigma);
    verdicts.push_back(
        inequality_verdict("spectral_low_snr", g, report.spectral + se3 + slack));
  } else {
    verdicts.push_back(skipped_verdict("spectral_low_snr",
                                       "sigma below the weak-signal regime"));
  }

  if (sigma <= 0.2) {
    const double scaled = sigma * sigma * g;
    const double slack =
        0.15 * 0.5 * (std::abs(report.azl_limit) + std::abs(report.azu_limit));
    const double lo = report.azl_limit - slack;
    const double hi = report.azu_limit + slack;
    ConsistencyVerdict v;
    v.name = "high_snr_band";
    v.status = (scaled >= lo && scaled <= hi) ? VerdictStatus::Pass
                                              : VerdictStatus::Fail;
    std::ostringstream os;
    os.precision(17);
    os << "sigma^2 estimate " << scaled << " vs band [" << lo << ", " << hi
       << "]";
    v.details = os.str();
    verdicts.push_back(v);
  } else {
    verdicts.push_back(skipped_verdict("high_snr_band",
                                       "sigma above the strong-signal regime"));
  }

  return verdicts;
}

}  // namespace wonham
