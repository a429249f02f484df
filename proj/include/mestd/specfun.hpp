#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace mestd {

// Special functions ---------------------------------------------------------

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);

/// exp(-|x|) * I0(x), finite for every real x.
double bessel_i0_scaled(double x);

/// Gamma function for x > 0. Throws NonPositiveArgument otherwise.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
double exp_integral_e1(double x);

/// exp(x) * E1(x), stable for large x where E1 underflows.
double exp_scaled_e1(double x);

// Quadrature ----------------------------------------------------------------

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature over [a, b].
///
/// `b` may be +infinity, in which case the substitution t = a + u/(1-u) maps
/// the range onto [0, 1). The interval with the largest error estimate is
/// bisected until the summed estimate falls below max(abs_tol, rel_tol*|I|)
/// or the evaluation cap is hit; in the latter case `converged` is false and
/// `value` holds the best estimate.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts);

inline QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                  double tol) {
  return integrate(f, a, b, QuadratureOptions{tol, 0.0});
}

/// Like integrate() but throws ToleranceNotReached instead of returning an
/// unconverged estimate.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts);

// Root finding --------------------------------------------------------------

/// Brent's method on a sign-changing bracket [lo, hi]: inverse quadratic and
/// secant steps safeguarded by bisection. Returns x with |g(x)| <= tol or a
/// bracket narrower than tol. Throws NoSignChange if g(lo)*g(hi) > 0.
double find_root(const std::function<double(double)>& g, double lo, double hi, double tol,
                 int max_iterations = 200);

}  // namespace mestd
