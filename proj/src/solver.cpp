#include "mestd/solver.hpp"

#include <Eigen/LU>

#include <cmath>

#include "mestd/hbrate.hpp"
#include "mestd/specfun.hpp"
#include "program.hpp"

namespace mestd {

namespace {

using detail::Program;

constexpr double kLineSearchAlpha = 0.01;
constexpr double kLineSearchBeta = 0.5;
constexpr int kMaxBacktracks = 60;
constexpr double kCentringThreshold = 0.1;
constexpr int kPolishIterations = 4;
constexpr double kPolishFloor = 1e-13;

bool strictly_feasible(const Program& prog, const Vector& d) {
  return prog.in_domain(d) && (prog.constraints(d).array() < 0.0).all();
}

// Scales the no-rate chain by theta < 1 so every chain constraint is strictly
// slack, and picks theta so the point spends half the rate budget.
Vector initial_point(const Program& prog, const DiscreteFading& fading, const SourceModel& src,
                     double slack) {
  const Vector bar = no_rate_distortions(fading, src);
  auto excess = [&](double theta) { return prog.rate_constraint(Vector(theta * bar)) + 0.5 * src.rate; };
  if (excess(slack) >= 0.0) return slack * bar;
  double lo = slack;
  while (excess(lo) < 0.0) lo *= 0.5;
  return find_root(excess, lo, slack, 1e-15) * bar;
}

struct Iterate {
  Vector d;
  Vector lambda;  // chain duals, one per layer
  double mu = 0.0;
};

// Residual of the modified KKT system at barrier parameter t.
Vector barrier_residual(const Program& prog, const Iterate& it, double t) {
  const Eigen::Index m = prog.size();
  const Vector f = prog.constraints(it.d);
  Vector r(2 * m + 1);
  r.head(m) = prog.lagrangian_gradient(it.d, it.mu, it.lambda);
  r[m] = -it.mu * f[0] - 1.0 / t;
  for (Eigen::Index i = 0; i < m; ++i) r[m + 1 + i] = -it.lambda[i] * f[i + 1] - 1.0 / t;
  return r;
}

LayeredSolution pack(const Iterate& it, const DiscreteFading& fading, const SourceModel& src) {
  LayeredSolution sol;
  sol.distortions = it.d;
  sol.dual_lambda = it.lambda;
  sol.dual_mu = it.mu;
  complete_primal(sol, fading, src);
  return sol;
}

LayeredSolution zero_rate_solution(const DiscreteFading& fading, const SourceModel& src) {
  LayeredSolution sol;
  sol.distortions = no_rate_distortions(fading, src);
  complete_primal(sol, fading, src);
  const auto duals =
      recover_duals(sol.distortions, fading, src, std::vector<bool>(static_cast<std::size_t>(fading.size()), false));
  sol.dual_lambda = duals.lambda;
  sol.dual_mu = duals.mu;
  sol.kkt_residual = kkt_certify(sol, fading, src).max();
  sol.converged = true;
  return sol;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorCode::InvalidParameter, "solver tolerance must be > 0");
  if (!(barrier_reduction > 0.0 && barrier_reduction < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "barrier_reduction must lie in (0, 1)");
  }
  if (!(initial_point_slack > 0.0 && initial_point_slack < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "initial_point_slack must lie in (0, 1)");
  }
  if (max_iterations < 1) throw Error(ErrorCode::InvalidParameter, "max_iterations must be >= 1");
}

LayeredSolution solve_mstate(const DiscreteFading& fading, const SourceModel& src, const SolverConfig& cfg) {
  cfg.validate();
  if (src.rate == 0.0) return zero_rate_solution(fading, src);

  const Program prog(fading, src);
  const Eigen::Index m = prog.size();
  const Eigen::Index n_constraints = m + 1;
  const double growth = 1.0 / cfg.barrier_reduction;

  Iterate it;
  it.d = initial_point(prog, fading, src, cfg.initial_point_slack);
  {
    // Start on the central path of the surrogate gap p^T D0.
    const Vector f = prog.constraints(it.d);
    const double kappa = prog.probs().dot(it.d) / static_cast<double>(n_constraints);
    it.mu = kappa / -f[0];
    it.lambda = (kappa / -f.tail(m).array()).matrix();
  }

  LayeredSolution best;
  double best_residual = kInfinity;
  Eigen::MatrixXd kkt(2 * m + 1, 2 * m + 1);
  double last_step = 1.0;
  int polish = kPolishIterations;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    LayeredSolution current = pack(it, fading, src);
    const double residual = kkt_certify(current, fading, src).max();
    if (residual < best_residual) {
      best_residual = residual;
      best = std::move(current);
      best.kkt_residual = residual;
      best.iterations = iter;
    }
    if (residual <= cfg.tolerance) {
      // Keep stepping while it still helps: on flat objectives a residual at
      // the tolerance leaves the distortions noticeably short of the optimum.
      if (polish == 0 || residual > best_residual || residual <= kPolishFloor) {
        best.converged = true;
        return best;
      }
      --polish;
    }

    const Vector f = prog.constraints(it.d);
    const double gap = -(it.mu * f[0] + it.lambda.dot(f.tail(m)));
    // A short previous step means the iterate is badly off-centre: re-centre at
    // the current gap instead of shrinking it.
    const double t = (last_step < kCentringThreshold ? 1.0 : growth) * static_cast<double>(n_constraints) / gap;

    // [ H        Df^T      ] [dD]     [ r_dual ]
    // [ -diag(l)Df  -diag(f)] [dl] = - [ r_cent ]
    const Eigen::MatrixXd jac = prog.jacobian(it.d);
    Vector duals(n_constraints);
    duals[0] = it.mu;
    duals.tail(m) = it.lambda;
    kkt.setZero();
    kkt.topLeftCorner(m, m).diagonal() = prog.weighted_hessian_diagonal(it.d, it.mu, it.lambda);
    kkt.topRightCorner(m, n_constraints) = jac.transpose();
    kkt.bottomLeftCorner(n_constraints, m) = -(duals.asDiagonal() * jac);
    kkt.bottomRightCorner(n_constraints, n_constraints).diagonal() = -f;
    const Vector r = barrier_residual(prog, it, t);
    const Vector step = kkt.partialPivLu().solve(-r);
    const Vector dd = step.head(m);
    const Vector dmu_lambda = step.tail(n_constraints);

    double s = 1.0;
    for (Eigen::Index k = 0; k < n_constraints; ++k) {
      if (dmu_lambda[k] < 0.0) s = std::min(s, -duals[k] / dmu_lambda[k]);
    }
    s *= 0.99;

    auto trial = [&](double len) {
      Iterate next;
      next.d = it.d + len * dd;
      next.mu = it.mu + len * dmu_lambda[0];
      next.lambda = it.lambda + len * dmu_lambda.tail(m);
      return next;
    };
    int backtracks = 0;
    while (!strictly_feasible(prog, trial(s).d) && backtracks < kMaxBacktracks) {
      s *= kLineSearchBeta;
      ++backtracks;
    }
    const double r_norm = r.norm();
    while (backtracks < kMaxBacktracks &&
           barrier_residual(prog, trial(s), t).norm() > (1.0 - kLineSearchAlpha * s) * r_norm) {
      s *= kLineSearchBeta;
      ++backtracks;
    }
    if (backtracks >= kMaxBacktracks) break;
    it = trial(s);
    last_step = s;
  }
  best.converged = best_residual <= cfg.tolerance;
  return best;
}

}  // namespace mestd
