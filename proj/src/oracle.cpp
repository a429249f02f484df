#include <cmath>

#include "mestd/solver.hpp"
#include "mestd/specfun.hpp"

namespace mestd {

namespace {

// Grid lo, lo + step, ... below hi, then hi itself.
template <class F>
void for_each_grid_point(double lo, double hi, double step, F&& visit) {
  const auto count = static_cast<long>(std::floor((hi - lo) / step));
  for (long k = 0; k <= count; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    if (x < hi) visit(x);
  }
  visit(hi);
}

}  // namespace

OracleResult brute_force_oracle(const DiscreteFading& fading, const SourceModel& src, double grid_step) {
  const Eigen::Index m = fading.size();
  if (m > 3) throw Error(ErrorCode::InvalidStateCount, "brute-force oracle supports M <= 3");
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidParameter, "grid step must be > 0");

  const Vector& p = fading.probs();
  const Vector& s = fading.states();
  const double base = src.precision() + s[0];
  const double shrink = std::exp(-2.0 * src.rate);

  OracleResult out;
  out.distortions.resize(m);
  if (m == 1) {
    out.distortions[0] = shrink / base;
    out.expected_distortion = out.distortions[0];
    out.evaluated_points = 1;
    return out;
  }

  const double d1_lo = shrink / base;
  const double d1_hi = 1.0 / base;
  if (d1_hi - d1_lo < grid_step) {
    throw Error(ErrorCode::GridTooCoarse, "feasible D_1 range is narrower than the grid step");
  }

  const double gap1 = s[1] - s[0];
  const double gap2 = m == 3 ? s[2] - s[1] : 0.0;
  const double d_last_max = 1.0 / (src.precision() + s[m - 1]);
  const double g1 = p[0] + p[m - 1] * d_last_max * gap1;
  const double g2 = m == 3 ? p[1] + p[m - 1] * d_last_max * gap2 : 0.0;
  out.resolution_bound = grid_step * (g1 + 2.0 * g2);

  double best = kInfinity;
  auto consider = [&](double e, double d1, double d2, double d3) {
    ++out.evaluated_points;
    if (e < best) {
      best = e;
      out.distortions[0] = d1;
      out.distortions[1] = d2;
      if (m == 3) out.distortions[2] = d3;
    }
  };

  for_each_grid_point(d1_lo, d1_hi, grid_step, [&](double d1) {
    const double after1 = shrink / (base * (1.0 + gap1 * d1));
    const double bound2 = d1 / (1.0 + gap1 * d1);
    if (m == 2) {
      // Rate held with equality gives D_2 = after1; feasibility needs D_2 <= bound2.
      const double d2 = std::min(after1, bound2);
      consider(p[0] * d1 + p[1] * d2, d1, d2, 0.0);
      return;
    }
    const double d2_lo = std::min(after1, bound2);
    for_each_grid_point(d2_lo, bound2, grid_step, [&](double d2) {
      const double d3_rate = after1 / (1.0 + gap2 * d2);
      const double bound3 = d2 / (1.0 + gap2 * d2);
      const double d3 = std::min(d3_rate, bound3);
      consider(p[0] * d1 + p[1] * d2 + p[2] * d3, d1, d2, d3);
    });
  });
  out.expected_distortion = best;
  return out;
}

}  // namespace mestd
