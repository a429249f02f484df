#pragma once

#include <Eigen/Core>

#include <cmath>

#include "mestd/model.hpp"

namespace mestd {

/// Conditional variances and layer rates of the Heegard-Berger chain.
template <typename Scalar>
struct VarianceChainT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> variances;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rates;
  Scalar total_rate = Scalar(0);
};
using VarianceChain = VarianceChainT<double>;

namespace detail {

template <typename Derived>
void require_positive_distortions(const Eigen::MatrixBase<Derived>& d, Eigen::Index expected) {
  if (d.size() != expected) {
    throw Error(ErrorCode::InvalidStateCount, "distortion vector length differs from the state count");
  }
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0)) throw Error(ErrorCode::NonPositiveDistortion, "D_" + std::to_string(i + 1) + " <= 0");
  }
}

}  // namespace detail

/// Runs V_i = min((V_{i-1}^{-1} + s_i - s_{i-1})^{-1}, D_i) from V_0 = sigma^2,
/// s_0 = 0, with layer rates R_i = 1/2 log(bound_i / V_i). Distortions above
/// the no-rate bound are clamped by the min.
template <typename Derived>
VarianceChainT<typename Derived::Scalar> variance_chain(const Eigen::MatrixBase<Derived>& d,
                                                        const DiscreteFading& fading,
                                                        const SourceModel& src) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  detail::require_positive_distortions(d, fading.size());
  const Eigen::Index m = fading.size();
  VarianceChainT<Scalar> chain;
  chain.variances.resize(m);
  chain.rates.resize(m);
  Scalar prev_v = Scalar(src.sigma2);
  Scalar prev_s = Scalar(0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar s = Scalar(fading.state(i));
    const Scalar bound = Scalar(1) / (Scalar(1) / prev_v + (s - prev_s));
    const Scalar v = d[i] < bound ? Scalar(d[i]) : bound;
    chain.variances[i] = v;
    chain.rates[i] = Scalar(0.5) * log(bound / v);
    prev_v = v;
    prev_s = s;
  }
  chain.total_rate = chain.rates.sum();
  return chain;
}

/// Heegard-Berger rate in closed form:
/// -1/2 log(sigma^-2 + s_1) - 1/2 log V_M - 1/2 sum_{i<M} log(1 + (s_{i+1}-s_i) V_i).
template <typename Derived>
typename Derived::Scalar hb_rate(const Eigen::MatrixBase<Derived>& d, const DiscreteFading& fading,
                                 const SourceModel& src) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  const auto chain = variance_chain(d, fading, src);
  const Eigen::Index m = fading.size();
  Scalar rate = -Scalar(0.5) * log(Scalar(src.precision()) + Scalar(fading.state(0))) -
                Scalar(0.5) * log(chain.variances[m - 1]);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const Scalar gap = Scalar(fading.state(i + 1)) - Scalar(fading.state(i));
    rate -= Scalar(0.5) * log(Scalar(1) + gap * chain.variances[i]);
  }
  return rate;
}

/// Codebook gains a_i = V_i^{-1} - V_{i-1}^{-1} - (s_i - s_{i-1}) of W_i = a_i X + N_i.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> codebook_coefficients(const VarianceChainT<Scalar>& chain,
                                                               const DiscreteFading& fading,
                                                               const SourceModel& src) {
  const Eigen::Index m = chain.variances.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> a(m);
  Scalar prev_precision = Scalar(src.precision());
  Scalar prev_s = Scalar(0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar precision = Scalar(1) / chain.variances[i];
    const Scalar s = Scalar(fading.state(i));
    const Scalar ai = precision - prev_precision - (s - prev_s);
    // The min in the recursion makes a_i >= 0; only rounding can push it below.
    a[i] = ai > Scalar(0) ? ai : Scalar(0);
    prev_precision = precision;
    prev_s = s;
  }
  return a;
}

/// No-rate distortions (sigma^-2 + s_i)^{-1}, i.e. the chain with every D_i = sigma^2.
Vector no_rate_distortions(const DiscreteFading& fading, const SourceModel& src);

/// Two-state Pareto boundary D2(D1) at total rate R_X.
/// Throws OutOfParetoRange unless D1 lies in [(e^{2R}(sigma^-2+s1))^{-1}, (sigma^-2+s1)^{-1}].
double pareto_d2(double d1, const DiscreteFading& fading, const SourceModel& src);

/// Gaussian distortion-rate function without side information: sigma^2 e^{-2R}.
double no_si_distortion(const SourceModel& src);

/// Wyner-Ziv distortion with a known gain s: (sigma^-2 + s)^{-1} e^{-2R}.
double wyner_ziv_distortion(const SourceModel& src, double s);

}  // namespace mestd
