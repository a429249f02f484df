#include "mestd/contfade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mestd/specfun.hpp"

namespace mestd {

namespace {

// Integrates h over [a, b] (b may be infinite), splitting at s_cut and at the
// knots of a tabulated pdf so every piece is smooth.
double integrate_pieces(const ContinuousFading& fading, const std::function<double(double)>& h, double a,
                        double b, double s_cut, const QuadratureOptions& opts) {
  b = std::min(b, fading.support_end());
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  if (const auto* knots = fading.knots()) {
    for (double k : *knots) {
      if (k > a && k < b) cuts.push_back(k);
    }
  } else if (s_cut > a && s_cut < b) {
    cuts.push_back(s_cut);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    const auto res = integrate(h, cuts[k - 1], cuts[k], opts);
    if (!res.converged) {
      throw Error(ErrorCode::QuadratureFailure, "integral on [" + std::to_string(cuts[k - 1]) + ", " +
                                                    std::to_string(cuts[k]) + "] did not converge");
    }
    total += res.value;
  }
  return total;
}

QuadratureOptions tight(double abs_tol) {
  QuadratureOptions o;
  o.abs_tol = abs_tol;
  o.rel_tol = 1e-12;
  return o;
}

double post_jump(double s_a, const SourceModel& src) {
  return (s_a + src.precision()) * std::exp(2.0 * src.rate);
}

}  // namespace

double truncation_point(const ContinuousFading& fading, double tail_mass) {
  const double end = fading.support_end();
  if (std::isfinite(end)) return end;
  double s = fading.scale();
  for (int k = 0; k < 200 && fading.mass(s, kInfinity) >= tail_mass; ++k) s *= 2.0;
  return s;
}

void check_quasiconcave(const ContinuousFading& fading, double s_cut, int grid, double tol) {
  std::vector<double> f(static_cast<std::size_t>(grid) + 1);
  for (int k = 0; k <= grid; ++k) f[static_cast<std::size_t>(k)] = fading.pdf(s_cut * k / grid);
  // A sample below both the best value to its left and the best to its right
  // splits a superlevel set in two.
  std::vector<double> right_max(f.size());
  right_max.back() = f.back();
  for (std::size_t k = f.size() - 1; k-- > 0;) right_max[k] = std::max(f[k], right_max[k + 1]);
  double left_max = f.front();
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const double floor = std::min(left_max, right_max[k + 1]);
    if (f[k] < floor - tol) {
      throw Error(ErrorCode::NotQuasiconcave,
                  "pdf dips at s = " + std::to_string(s_cut * static_cast<double>(k) / grid) +
                      " between two higher regions");
    }
    left_max = std::max(left_max, f[k]);
  }
}

double locate_mode(const ContinuousFading& fading, double s_cut, int grid) {
  int best = 0;
  double best_f = -kInfinity;
  for (int k = 0; k <= grid; ++k) {
    const double v = fading.pdf(s_cut * k / grid);
    if (v > best_f) {
      best_f = v;
      best = k;
    }
  }
  double lo = s_cut * std::max(best - 1, 0) / grid;
  double hi = s_cut * std::min(best + 1, grid) / grid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fading.pdf(x1);
  double f2 = fading.pdf(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fading.pdf(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fading.pdf(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  // The golden-section bracket never contains the endpoint itself.
  if (best == 0 && fading.pdf(0.0) >= fading.pdf(mid)) return 0.0;
  return mid;
}

// Distortion profile ---------------------------------------------------------

DistortionProfile::DistortionProfile(double s_a, const SourceModel& src)
    : s_a_(s_a), precision_(src.precision()), post_jump_(post_jump(s_a, src)) {
  if (!(s_a >= 0.0)) throw Error(ErrorCode::NegativeGain, "target gain must be >= 0");
}

double DistortionProfile::distortion(double s) const {
  if (s < 0.0) throw Error(ErrorCode::NegativeGain, "distortion profile evaluated at s < 0");
  if (s < s_a_) return 1.0 / (s + precision_);
  return 1.0 / (s - s_a_ + post_jump_);
}

double DistortionProfile::derivative(double s) const {
  const double d = distortion(s);
  return -d * d;
}

double DistortionProfile::jump_rate() const {
  return 0.5 * std::log(post_jump_ / (s_a_ + precision_));
}

double DistortionProfile::rate_functional(double z) const {
  const QuadratureOptions opts = tight(1e-14);
  double area = 0.0;
  auto d = [this](double s) { return distortion(s); };
  if (s_a_ > 0.0) area += integrate_or_throw(d, 0.0, std::min(s_a_, z), opts);
  if (z > s_a_) area += integrate_or_throw(d, s_a_, z, opts);
  return -0.5 * std::log(precision_) - 0.5 * (std::log(distortion(z)) + area);
}

double continuous_rate_density(const DistortionProfile& profile, double s) {
  if (s == profile.s_a()) throw Error(ErrorCode::AtDiscontinuity, "rate density is a Dirac mass at s_a");
  const double d = profile.distortion(s);
  return -0.5 * (d + profile.derivative(s) / d);
}

double total_rate(const DistortionProfile& profile, double quad_tol) {
  auto density = [&profile](double s) { return continuous_rate_density(profile, s); };
  QuadratureOptions opts;
  opts.abs_tol = quad_tol;
  double smooth = 0.0;
  if (profile.s_a() > 0.0) smooth += integrate_or_throw(density, 0.0, profile.s_a(), opts);
  smooth += integrate_or_throw(density, profile.s_a(), kInfinity, opts);
  return smooth + profile.jump_rate();
}

// Single-layer solution ------------------------------------------------------

double single_layer_expected_distortion(const ContinuousFading& fading, const SourceModel& src, double s_a,
                                        double quad_tol) {
  const double s_cut = truncation_point(fading);
  const double c = post_jump(s_a, src);
  const double prec = src.precision();
  const QuadratureOptions opts = tight(quad_tol * 1e-3);
  double below = 0.0;
  if (s_a > 0.0) {
    below = integrate_pieces(fading, [&](double s) { return fading.pdf(s) / (s + prec); }, 0.0, s_a, s_cut,
                             opts);
  }
  const double above = integrate_pieces(
      fading, [&](double s) { return fading.pdf(s) / (s - s_a + c); }, s_a, kInfinity, s_cut, opts);
  return below + above;
}

double single_layer_balance(const ContinuousFading& fading, const SourceModel& src, double s_a,
                            double s_cut, double quad_tol) {
  const double c = post_jump(s_a, src);
  auto weighted = [&](double s) {
    const double q = s - s_a + c;
    return c * fading.pdf(s) / (q * q);
  };
  const double integral = integrate_pieces(fading, weighted, s_a, kInfinity, s_cut, tight(quad_tol * 1e-2));
  return integral - fading.pdf(s_a);
}

DualCertificate dual_certificate(const ContinuousFading& fading, const SingleLayerSolution& sol,
                                 const SourceModel& src, int grid, const ContinuousOptions& opts) {
  const double s_a = sol.s_a;
  const double half_mu = 0.5 * sol.mu;
  const double prec = src.precision();
  const double c = post_jump(s_a, src);
  const double end = std::min(std::max(opts.certificate_span * fading.scale(), sol.s_cut),
                              fading.support_end());

  std::vector<double> gains;
  gains.reserve(static_cast<std::size_t>(grid) + 2);
  for (int k = 0; k <= grid; ++k) gains.push_back(end * k / grid);
  if (s_a <= end) gains.push_back(s_a);
  std::sort(gains.begin(), gains.end());
  gains.erase(std::unique(gains.begin(), gains.end()), gains.end());
  const auto anchor = static_cast<std::size_t>(std::lower_bound(gains.begin(), gains.end(), s_a) - gains.begin());

  auto w1 = [&](double s) {
    const double r = (s_a + prec) / (s + prec);
    return r * r;
  };
  auto w2 = [&](double s) {
    const double r = c / (s - s_a + c);
    return r * r;
  };
  const QuadratureOptions qo = tight(1e-15);
  auto cell = [&](const std::function<double(double)>& h, double a, double b) {
    return integrate_pieces(fading, h, a, b, kInfinity, qo);
  };

  DualCertificate out;
  out.gains = gains;
  out.lambda.assign(gains.size(), 0.0);

  // Left of s_a: lambda(s) = -w1(s)^{-1} int_s^{s_a} w1 (f - mu/2).
  double acc = 0.0;
  for (std::size_t k = anchor; k-- > 0;) {
    acc += cell([&](double t) { return w1(t) * (fading.pdf(t) - half_mu); }, gains[k], gains[k + 1]);
    out.lambda[k] = -acc / w1(gains[k]);
  }
  // Right of s_a: the f part and the mu part accumulate separately so the
  // tail balance can use the closed form int_{s_a}^inf w2 = C.
  double acc_f = 0.0;
  for (std::size_t k = anchor + 1; k < gains.size(); ++k) {
    acc_f += cell([&](double t) { return w2(t) * fading.pdf(t); }, gains[k - 1], gains[k]);
    const double q = gains[k] - s_a + c;
    const double mu_part = c - c * c / q;  // int_{s_a}^s w2
    out.lambda[k] = (acc_f - half_mu * mu_part) / w2(gains[k]);
  }
  double tail_f = 0.0;
  if (gains.back() < fading.support_end()) {
    tail_f = integrate_pieces(fading, [&](double t) { return w2(t) * fading.pdf(t); }, gains.back(), kInfinity,
                              kInfinity, qo);
  }
  out.balance = acc_f + tail_f - half_mu * c;
  out.lambda_at_sa = anchor < gains.size() ? out.lambda[anchor] : 0.0;
  out.min_lambda = *std::min_element(out.lambda.begin(), out.lambda.end());
  return out;
}

SingleLayerSolution solve_single_layer(const ContinuousFading& fading, const SourceModel& src,
                                       const ContinuousOptions& opts) {
  SingleLayerSolution sol;
  sol.s_cut = truncation_point(fading, opts.tail_mass);
  check_quasiconcave(fading, sol.s_cut, opts.quasiconcavity_grid, opts.quasiconcavity_tol);

  auto g = [&](double s) { return single_layer_balance(fading, src, s, sol.s_cut, opts.quad_tol); };
  const double g0 = g(0.0);
  if (g0 <= 0.0) {
    sol.s_a = 0.0;
  } else {
    const double mode = locate_mode(fading, sol.s_cut, opts.quasiconcavity_grid);
    // Scan for the leftmost sign change before refining.
    constexpr int kScan = 64;
    double lo = 0.0;
    double hi = mode;
    for (int k = 1; k <= kScan; ++k) {
      const double x = mode * k / kScan;
      if (g(x) <= 0.0) {
        hi = x;
        break;
      }
      lo = x;
    }
    sol.s_a = find_root(g, lo, hi, 1e-14);
  }

  const double c = post_jump(sol.s_a, src);
  if (sol.s_a > 0.0) {
    sol.mu = 2.0 * fading.pdf(sol.s_a);
  } else {
    // Boundary case: mu/2 is the w-weighted mean of f, which need not equal f(0).
    auto weighted = [&](double s) {
      const double q = s + c;
      return c * fading.pdf(s) / (q * q);
    };
    sol.mu = 2.0 * integrate_pieces(fading, weighted, 0.0, kInfinity, sol.s_cut, tight(opts.quad_tol * 1e-2));
  }

  const double mode = locate_mode(fading, sol.s_cut, opts.quasiconcavity_grid);
  const double half_mu = 0.5 * sol.mu;
  const double from = std::max(mode, sol.s_a);
  if (fading.pdf(sol.s_cut) >= half_mu) {
    sol.s_b = sol.s_cut;
  } else if (fading.pdf(from) <= half_mu) {
    sol.s_b = from;
  } else {
    sol.s_b = find_root([&](double s) { return fading.pdf(s) - half_mu; }, from, sol.s_cut, 1e-14);
  }

  sol.expected_distortion = single_layer_expected_distortion(fading, src, sol.s_a, opts.quad_tol);
  const auto cert = dual_certificate(fading, sol, src, opts.certificate_grid, opts);
  sol.certificate_min_lambda = cert.min_lambda;
  sol.certificate_balance = cert.balance;
  return sol;
}

double rayleigh_closed_form(double mean, const SourceModel& src) {
  if (!(mean > 0.0)) throw Error(ErrorCode::InvalidParameter, "Rayleigh mean gain must be > 0");
  const double c = src.precision() * std::exp(2.0 * src.rate);
  return exp_scaled_e1(c / mean) / mean;
}

std::vector<double> distortion_exponent(const ContinuousFading& fading, const SourceModel& src_base,
                                        const std::vector<double>& rates, const ContinuousOptions& opts) {
  std::vector<double> out;
  out.reserve(rates.size());
  double prev = 0.0;
  for (double r : rates) {
    if (!(r > prev)) throw Error(ErrorCode::InvalidParameter, "rates must be positive and ascending");
    prev = r;
    const SourceModel src(src_base.sigma2, r);
    const auto sol = solve_single_layer(fading, src, opts);
    out.push_back(-std::log(sol.expected_distortion) / (2.0 * r));
  }
  return out;
}

}  // namespace mestd
