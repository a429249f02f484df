#include "mestd/discretize.hpp"

#include <cmath>

#include "mestd/specfun.hpp"

namespace mestd {

DiscreteFading discretize_pdf(const ContinuousFading& fading, int states, double s_max) {
  if (states < 2) throw Error(ErrorCode::InvalidStateCount, "discretization needs M >= 2");
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw Error(ErrorCode::InvalidParameter, "s_M must be > 0");

  const Eigen::Index m = states;
  Vector s(m);
  for (Eigen::Index i = 0; i < m; ++i) s[i] = s_max * static_cast<double>(i) / static_cast<double>(m - 1);
  s[m - 1] = s_max;

  Vector p(m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) p[i] = fading.mass(s[i], s[i + 1]);
  p[m - 1] = fading.mass(s[m - 1], kInfinity);

  const double total = p.sum();
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorCode::QuadratureFailure, "discretized masses sum to " + std::to_string(total));
  }
  p /= total;
  return DiscreteFading(std::move(s), std::move(p));
}

}  // namespace mestd
