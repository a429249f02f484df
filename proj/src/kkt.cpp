#include <cmath>

#include "mestd/hbrate.hpp"
#include "mestd/solver.hpp"
#include "mestd/specfun.hpp"
#include "program.hpp"

namespace mestd {

KktReport kkt_certify(const LayeredSolution& candidate, const DiscreteFading& fading,
                      const SourceModel& src) {
  const detail::Program prog(fading, src);
  const Eigen::Index m = prog.size();
  if (candidate.distortions.size() != m || candidate.dual_lambda.size() != m) {
    throw Error(ErrorCode::InvalidStateCount, "candidate does not match the fading state count");
  }
  const Vector& d = candidate.distortions;
  const Vector& lambda = candidate.dual_lambda;
  const double mu = candidate.dual_mu;

  KktReport report;
  if (!prog.in_domain(d)) {
    report.primal_infeasibility = kInfinity;
    report.stationarity_residual = kInfinity;
    return report;
  }
  report.stationarity_residual = prog.lagrangian_gradient(d, mu, lambda).lpNorm<Eigen::Infinity>();

  const Vector f = prog.constraints(d);
  double comp = std::abs(mu * f[0]);
  for (Eigen::Index i = 0; i < m; ++i) comp = std::max(comp, std::abs(lambda[i] * f[i + 1]));
  report.complementarity_residual = comp;
  report.primal_infeasibility = std::max(0.0, f.maxCoeff());
  report.dual_infeasibility = std::max({0.0, -mu, -lambda.minCoeff()});
  return report;
}

DualEstimate recover_duals(const Vector& d, const DiscreteFading& fading, const SourceModel& src,
                           const std::vector<bool>& slack) {
  const detail::Program prog(fading, src);
  const Eigen::Index m = prog.size();
  // lambda_i = alpha_i mu + beta_i, from the stationarity conditions read backwards.
  Vector alpha(m);
  Vector beta(m);
  alpha[m - 1] = 0.5 / d[m - 1];
  beta[m - 1] = -prog.probs()[m - 1];
  for (Eigen::Index i = m - 2; i >= 0; --i) {
    const double q = 1.0 + prog.gap(i) * d[i];
    alpha[i] = alpha[i + 1] / (q * q) + 0.5 * prog.gap(i) / q;
    beta[i] = beta[i + 1] / (q * q) - prog.probs()[i];
  }

  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (slack[static_cast<std::size_t>(i)]) {
      num -= alpha[i] * beta[i];
      den += alpha[i] * alpha[i];
    }
  }
  DualEstimate out;
  if (den > 0.0) {
    out.mu = std::max(0.0, num / den);
  } else {
    double mu = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) mu = std::max(mu, -beta[i] / alpha[i]);
    out.mu = mu;
  }
  out.lambda = alpha * out.mu + beta;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (slack[static_cast<std::size_t>(i)]) out.lambda[i] = 0.0;
  }
  return out;
}

void complete_primal(LayeredSolution& sol, const DiscreteFading& fading, const SourceModel& src) {
  const auto chain = variance_chain(sol.distortions, fading, src);
  sol.variances = chain.variances;
  sol.rates = chain.rates;
  sol.coefficients = codebook_coefficients(chain, fading, src);
  sol.expected_distortion = fading.probs().dot(sol.distortions);
}

}  // namespace mestd
