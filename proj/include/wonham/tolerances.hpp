#pragma once

namespace wonham {

/* Central tolerance configuration.  "structural" guards exact identities
 * (row sums, simplex membership); "algebraic" guards quantities obtained
 * through linear algebra (stationary solves, residuals, eigenvalues). */
struct Tolerances {
  double structural = 1e-12;
  double algebraic = 1e-10;
  double positivity = 1e-12;  // smallest admissible exp(Lambda) entry
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace wonham
