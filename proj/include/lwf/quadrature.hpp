#pragma once

#include <functional>

namespace lwf {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod 7/15: the interval with the largest error
/// estimate is bisected until the summed estimate meets the tolerance.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    int max_intervals = 4000);

/// Integral over [lo, hi] within [0, 1] of f(y, 1 - y).
///
/// The integrand is passed 1 - y separately so it stays accurate near y = 1.
/// When the range touches 0 (resp. 1) and the integrand behaves like
/// y^power_at_zero (resp. (1-y)^power_at_one) with a negative power, the
/// variable is changed so the transformed integrand is bounded there.
double integrate_unit_interval(const std::function<double(double, double)>& f, double lo,
                               double hi, double power_at_zero, double power_at_one,
                               double rel_tol = 1e-11);

}  // namespace lwf
