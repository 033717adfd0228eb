#pragma once

// Special functions and quadrature used by the closed-form coverage
// expressions. Everything here is a pure function of its arguments.

#include <functional>

namespace lora::special {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
};

/// Gamma function for x > 0. Throws DomainError otherwise.
double gamma(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Gauss hypergeometric 2F1(a, b; c; z) for real arguments and z < 1.
///
/// Evaluation strategy:
///  - z in [0, 0.95]: direct Gauss series;
///  - z < 0: Pfaff transformation onto z/(z-1) in (0, 1);
///  - z in (0.95, 1): 1-z connection formula when c-a-b is not an
///    integer, otherwise the (slow) direct series.
/// Throws DomainError for z >= 1 or c a non-positive integer and
/// ConvergenceError if a series needs more than 10000 terms.
double hyp2f1(double a, double b, double c, double z);

/// Confluent hypergeometric 1F1(a; b; z) (Kummer's function).
/// Negative z goes through Kummer's transformation so the summed series
/// has no cancellation.
double hyp1f1(double a, double b, double z);

/// Theta(x) = 2F1(1, -delta; 1 - delta; -x) - 1, the interference
/// functional of a Rayleigh-faded PPP seen beyond the serving distance.
/// `x` is a linear power ratio (never dB), `delta` = 2 / beta in (0, 1).
double theta(double x, double delta);

/// Integral of f over [0, inf) by adaptive 7/15-point Gauss-Kronrod on
/// the image of x = t / (1 - t). Throws ConvergenceError when the
/// subdivision budget is exhausted; the exception carries the achieved
/// error estimate.
double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

/// Same rule on a finite interval [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace lora::special
