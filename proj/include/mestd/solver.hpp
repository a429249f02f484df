#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <vector>

#include "mestd/model.hpp"

namespace mestd {

struct SolverConfig {
  double tolerance = 1e-8;          // target for KktReport::max()
  int max_iterations = 200;
  double barrier_reduction = 0.1;   // t grows by 1/barrier_reduction per step
  double initial_point_slack = 0.99;

  void validate() const;
};

/// Residuals of the KKT system of the compact expected-distortion program.
struct KktReport {
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;

  double max() const {
    return std::max({stationarity_residual, complementarity_residual, primal_infeasibility,
                     dual_infeasibility});
  }
};

/// Minimizes p^T D subject to the Heegard-Berger rate constraint and the
/// degradedness chain D_i <= (D_{i-1}^{-1} + s_i - s_{i-1})^{-1}, using a
/// primal-dual interior-point method. The returned solution carries its duals
/// and KKT residual; `converged` is false when max_iterations ran out, in
/// which case the best iterate seen is returned.
LayeredSolution solve_mstate(const DiscreteFading& fading, const SourceModel& src,
                             const SolverConfig& cfg = {});

/// Evaluates every KKT residual at the candidate's primal and dual values.
KktReport kkt_certify(const LayeredSolution& candidate, const DiscreteFading& fading,
                      const SourceModel& src);

/// Duals consistent with stationarity at the primal point `d`.
///
/// Stationarity fixes every lambda_i as an affine function of mu; mu is then
/// chosen so that lambda vanishes on the constraints flagged slack (least
/// squares), or as the smallest mu keeping all lambda_i >= 0 when none is.
struct DualEstimate {
  Vector lambda;
  double mu = 0.0;
};
DualEstimate recover_duals(const Vector& d, const DiscreteFading& fading, const SourceModel& src,
                           const std::vector<bool>& slack);

/// Fills variances, rates, coefficients and expected distortion from
/// `distortions` (and leaves the duals untouched).
void complete_primal(LayeredSolution& sol, const DiscreteFading& fading, const SourceModel& src);

struct OracleResult {
  Vector distortions;
  double expected_distortion = 0.0;
  /// Upper bound on how far the grid minimum can sit above the true minimum.
  double resolution_bound = 0.0;
  std::size_t evaluated_points = 0;
};

/// Exhaustive grid search for M <= 3: D_1 (and D_2) on a grid of spacing
/// `grid_step` over their feasible boxes, with D_M set by holding the rate
/// constraint with equality. Throws GridTooCoarse when the D_1 box is
/// narrower than one step.
OracleResult brute_force_oracle(const DiscreteFading& fading, const SourceModel& src, double grid_step);

}  // namespace mestd
