#pragma once

#include <functional>

namespace coalsim {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7-15 with interval bisection. Throws numerical_error
// when the interval stack is exhausted before the tolerance is met (unless
// no_throw is set, in which case converged is false).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_tol = 0.0,
                           int max_intervals = 4000, bool no_throw = false);

// Integral over (0, b] of an integrand carrying an x^{1-alpha} endpoint factor
// at zero. Substitutes x = u^{1/(2-alpha)}, which maps the singular factor to
// a constant, then integrates adaptively in u.
QuadratureResult integrate_singular_left(const std::function<double(double)>& f,
                                         double alpha, double b,
                                         double rel_tol = 1e-10);

}  // namespace coalsim
