#pragma once

#include <vector>

#include "mestd/model.hpp"

namespace mestd {

/// Settings for the continuous-fading solver. Defaults follow the library's
/// reference configuration.
struct ContinuousOptions {
  double quad_tol = 1e-10;         // absolute quadrature tolerance
  double tail_mass = 1e-10;        // mass allowed beyond the truncation point
  int quasiconcavity_grid = 2048;
  double quasiconcavity_tol = 1e-12;
  int certificate_grid = 2048;
  double certificate_span = 20.0;  // certificate grid covers [0, span * scale]
};

/// Smallest s in the doubling sequence scale * 2^k whose upper-tail mass is
/// below `tail_mass`; the support end for tabulated pdfs.
double truncation_point(const ContinuousFading& fading, double tail_mass = 1e-10);

/// Throws NotQuasiconcave if some superlevel set of the pdf, sampled on a
/// uniform grid over [0, s_cut], is not a single interval.
void check_quasiconcave(const ContinuousFading& fading, double s_cut, int grid = 2048,
                        double tol = 1e-12);

/// Location of the pdf maximum on [0, s_cut]: grid argmax refined by
/// golden-section search.
double locate_mode(const ContinuousFading& fading, double s_cut, int grid = 2048);

/// Distortion D_(1)(s) of the single-layer allocation targeted at s_a.
class DistortionProfile {
 public:
  DistortionProfile(double s_a, const SourceModel& src);

  double s_a() const { return s_a_; }
  /// (s_a + sigma^-2) e^{2R_X}: the precision just after the jump.
  double post_jump_precision() const { return post_jump_; }

  double distortion(double s) const;
  double derivative(double s) const;
  /// 1/2 log(D(s_a^-) / D(s_a^+)), the rate carried by the Dirac mass at s_a.
  double jump_rate() const;
  /// -1/2 log sigma^-2 - 1/2 (log D(z) + int_0^z D(s) ds).
  double rate_functional(double z) const;

 private:
  double s_a_;
  double precision_;  // sigma^-2
  double post_jump_;
};

/// Rate density -1/2 (D + D'/D) away from the jump. Throws AtDiscontinuity at s = s_a.
double continuous_rate_density(const DistortionProfile& profile, double s);

/// Smooth part of the rate integral plus the jump term.
double total_rate(const DistortionProfile& profile, double quad_tol = 1e-12);

/// Expected distortion of the single-layer profile, as the sum of its two
/// closed-form pieces integrated against the pdf.
double single_layer_expected_distortion(const ContinuousFading& fading, const SourceModel& src, double s_a,
                                        double quad_tol = 1e-10);

/// g(s_a) = int_{s_a}^inf w(s) f(s) ds - f(s_a), whose root pins the target gain.
double single_layer_balance(const ContinuousFading& fading, const SourceModel& src, double s_a,
                            double s_cut, double quad_tol = 1e-10);

struct DualCertificate {
  double min_lambda = 0.0;
  double lambda_at_sa = 0.0;
  double balance = 0.0;  // lim_{s->inf} w_2(s) lambda(s)
  std::vector<double> gains;
  std::vector<double> lambda;
};

/// Evaluates lambda(s) = w_i(s)^{-1} int_{s_a}^s w_i(t) (f(t) - mu/2) dt on a
/// grid, accumulating cell by cell, and estimates the tail balance.
DualCertificate dual_certificate(const ContinuousFading& fading, const SingleLayerSolution& sol,
                                 const SourceModel& src, int grid = 2048,
                                 const ContinuousOptions& opts = {});

/// Optimal single-layer allocation for a continuous quasiconcave pdf.
/// Throws NotQuasiconcave or QuadratureFailure.
SingleLayerSolution solve_single_layer(const ContinuousFading& fading, const SourceModel& src,
                                       const ContinuousOptions& opts = {});
inline SingleLayerSolution solve_single_layer(const ContinuousFading& fading, const SourceModel& src,
                                              double tol) {
  ContinuousOptions opts;
  opts.quad_tol = tol;
  return solve_single_layer(fading, src, opts);
}

/// Minimum expected distortion under Rayleigh fading with mean gain `mean`:
/// (1/mean) e^{C/mean} E1(C/mean), C = sigma^-2 e^{2R_X}.
double rayleigh_closed_form(double mean, const SourceModel& src);

/// -log E[D]* / (2 R_X) for each rate, using the single-layer optimum.
std::vector<double> distortion_exponent(const ContinuousFading& fading, const SourceModel& src_base,
                                        const std::vector<double>& rates,
                                        const ContinuousOptions& opts = {});

}  // namespace mestd
