#include "mestd/twostate.hpp"

#include <cmath>

#include "mestd/hbrate.hpp"
#include "mestd/specfun.hpp"

namespace mestd {

TwoStateSolution solve_two_state(const DiscreteFading& fading, const SourceModel& src) {
  if (fading.size() != 2) throw Error(ErrorCode::InvalidStateCount, "two-state solver needs M = 2");
  const double p1 = fading.prob(0);
  const double p2 = fading.prob(1);
  const double s1 = fading.state(0);
  const double gap = fading.state(1) - s1;
  const double base = src.precision() + s1;
  const double gain = std::exp(2.0 * src.rate);

  TwoStateSolution out;
  out.d1_lower = 1.0 / (gain * base);
  out.d1_upper = 1.0 / base;
  if (p2 == 0.0) {
    out.d1_stationary = -kInfinity;
  } else if (p1 == 0.0) {
    out.d1_stationary = kInfinity;
  } else {
    out.d1_stationary = (1.0 / std::sqrt(gain * base / gap * p1 / p2) - 1.0) / gap;
  }

  if (out.d1_stationary <= out.d1_lower) {
    out.d1 = out.d1_lower;
    out.active_bound = ActiveBound::BaseOnly;
  } else if (out.d1_stationary >= out.d1_upper) {
    out.d1 = out.d1_upper;
    out.active_bound = ActiveBound::TopOnly;
  } else {
    out.d1 = out.d1_stationary;
    out.active_bound = ActiveBound::Interior;
  }
  // With R_X = 0 the interval collapses and neither layer carries rate.
  if (src.rate == 0.0) out.active_bound = ActiveBound::BaseOnly;

  out.d2 = pareto_d2(out.d1, fading, src);
  const Eigen::Vector2d d(out.d1, out.d2);
  const auto chain = variance_chain(d, fading, src);
  out.r1 = chain.rates[0];
  out.r2 = chain.rates[1];
  // At a projection bound one layer carries the whole budget by definition;
  // don't leave rounding residue in the other.
  if (out.active_bound == ActiveBound::BaseOnly) {
    out.r1 = src.rate;
    out.r2 = 0.0;
  } else if (out.active_bound == ActiveBound::TopOnly) {
    out.r1 = 0.0;
    out.r2 = src.rate;
  }
  out.expected_distortion = p1 * out.d1 + p2 * out.d2;
  return out;
}

LayeredSolution two_state_as_layered(const TwoStateSolution& sol, const DiscreteFading& fading,
                                     const SourceModel& src) {
  LayeredSolution out;
  out.distortions = Eigen::Vector2d(sol.d1, sol.d2);
  complete_primal(out, fading, src);
  std::vector<bool> slack(2, false);
  if (src.rate > 0.0) {
    slack[0] = sol.active_bound != ActiveBound::TopOnly;
    slack[1] = sol.active_bound != ActiveBound::BaseOnly;
  }
  const auto duals = recover_duals(out.distortions, fading, src, slack);
  out.dual_lambda = duals.lambda;
  out.dual_mu = duals.mu;
  out.kkt_residual = kkt_certify(out, fading, src).max();
  out.converged = true;
  return out;
}

}  // namespace mestd
