#include "mestd/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "mestd/error.hpp"

namespace mestd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBesselSeriesLimit = 15.0;

// sum_k (x^2/4)^k / (k!)^2
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < kEps * sum) break;
  }
  return sum;
}

// sqrt(2 pi x) e^{-x} I0(x) for large x, summed until the terms stop shrinking.
double i0_asymptotic_factor(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return sum;
}

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos series A_g(z) for Gamma(z + 1).
double lanczos_sum(double z) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return a;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositiveArgument, std::string(what) + " requires x > 0");
}

// e^x E1(x) by the continued fraction, valid for x > 1.
double e1_continued_fraction_scaled(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

}  // namespace

double bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax <= kBesselSeriesLimit) return i0_series(ax);
  return std::exp(ax) / std::sqrt(2.0 * std::numbers::pi * ax) * i0_asymptotic_factor(ax);
}

double bessel_i0_scaled(double x) {
  const double ax = std::abs(x);
  if (ax <= kBesselSeriesLimit) return i0_series(ax) * std::exp(-ax);
  return i0_asymptotic_factor(ax) / std::sqrt(2.0 * std::numbers::pi * ax);
}

double gamma_fn(double x) {
  require_positive(x, "gamma_fn");
  if (x < 0.5) {
    // Reflection keeps the Lanczos sum in its accurate range.
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * half * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(lanczos_sum(z));
}

double exp_integral_e1(double x) {
  require_positive(x, "exp_integral_e1");
  if (x <= 1.0) return e1_series(x);
  return e1_continued_fraction_scaled(x) * std::exp(-x);
}

double exp_scaled_e1(double x) {
  require_positive(x, "exp_scaled_e1");
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_continued_fraction_scaled(x);
}

double find_root(const std::function<double(double)>& g, double lo, double hi, double tol,
                 int max_iterations) {
  double a = lo;
  double b = hi;
  double fa = g(a);
  double fb = g(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "root not bracketed");
  }
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || std::abs(fb) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = g(b);
  }
  return b;
}

}  // namespace mestd
