// Adaptive quadrature helpers. Integrands here are smooth and unimodal in log
// scale, so everything works on log-integrands and returns log-integrals;
// that keeps values like exp(4000) representable.
#pragma once

#include <functional>

namespace rwrs {

/// Adaptive Simpson on [a, b] with relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol);

/// log of integral of exp(phi) over (lo, hi), where phi is concave/unimodal
/// with its maximum near guess. Bounds may be +-infinity. Relative tolerance
/// applies to the integral of exp(phi - max phi).
double log_integral_exp(const std::function<double(double)>& phi, double lo,
                        double hi, double guess, double rel_tol);

/// Regularized upper incomplete gamma Q(a, x) in log scale, accurate for
/// large x where Q underflows.
double log_gamma_q(double a, double x);

}  // namespace rwrs
