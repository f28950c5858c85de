#pragma once

#include <string>
#include <vector>

#include "wonham/lyapunov.hpp"
#include "wonham/model.hpp"

namespace wonham {

/*
 * Closed-form stability rates computed directly from the model, plus the
 * machinery that compares a Monte Carlo gamma estimate against them.
 * Every bound is an upper limit on the decay rate (more negative =
 * faster guaranteed forgetting), so the checks all have the shape
 * "estimate <= bound + statistical tolerance".
 */

struct BoundsReport {
  double az = 0.0;         // -2 min over pairs of sqrt(l_ij l_ji)
  double mu_min = 0.0;     // mu-weighted row-minimum rate
  double bcl_rate = 0.0;   // exponential rate of the pathwise bound
  double spectral = 0.0;   // largest nonzero eigenvalue real part
  double azu_limit = 0.0;  // sigma^2-scaled limit, nearest level
  double azl_limit = 0.0;  // sigma^2-scaled limit, all levels
};

BoundsReport compute_bounds(const ModelSpec& spec);

enum class VerdictStatus { Pass, Fail, Skipped };

const char* verdict_status_name(VerdictStatus status);

struct ConsistencyVerdict {
  std::string name;
  VerdictStatus status = VerdictStatus::Skipped;
  std::string details;
};

// Compares the distance-slope estimate in `estimates` against the report.
// Regime-gated rows (low SNR needs sigma >= 10, the high-SNR band needs
// sigma <= 0.2) are emitted as Skipped outside their regime.  Verdicts are
// data: a Fail is a result, not an error.
std::vector<ConsistencyVerdict> check_bound_consistency(
    const std::vector<LyapunovEstimate>& estimates, const BoundsReport& report,
    const ModelSpec& spec);

}  // namespace wonham
