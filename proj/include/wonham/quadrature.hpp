#pragma once

#include <functional>

namespace wonham {

/* Recursive adaptive Simpson integration of f over [a, b] to the given
 * absolute tolerance, with Richardson extrapolation of the accepted panels.
 * The recursion depth cap guards against non-integrable behavior; on a
 * smooth integrand the estimate is far inside the tolerance. */
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 60);

}  // namespace wonham
