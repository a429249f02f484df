#pragma once

// Constraint functions of the compact expected-distortion program, shared by
// the interior-point solver and the KKT certifier.
//
// Constraint 0 is the rate constraint, constraint i (1..M) is the chain bound
// on D_i. All are written as f_k(D) <= 0.

#include <Eigen/Core>

#include <cmath>

#include "mestd/model.hpp"

namespace mestd::detail {

class Program {
 public:
  Program(const DiscreteFading& fading, const SourceModel& src)
      : p_(fading.probs()), m_(fading.size()), base_(src.precision() + fading.state(0)),
        sigma2_(src.sigma2), rate_(src.rate) {
    step_.resize(m_);  // step_[i] = s_i - s_{i-1}, s_{-1} = 0
    for (Eigen::Index i = 0; i < m_; ++i) step_[i] = fading.state(i) - (i > 0 ? fading.state(i - 1) : 0.0);
  }

  Eigen::Index size() const { return m_; }
  const Vector& probs() const { return p_; }

  // s_{i+1} - s_i for i < M-1.
  double gap(Eigen::Index i) const { return step_[i + 1]; }

  double prev_distortion(const Vector& d, Eigen::Index i) const { return i == 0 ? sigma2_ : d[i - 1]; }

  double chain_bound(const Vector& d, Eigen::Index i) const {
    return 1.0 / (1.0 / prev_distortion(d, i) + step_[i]);
  }

  double rate_constraint(const Vector& d) const {
    double v = -0.5 * std::log(base_) - 0.5 * std::log(d[m_ - 1]) - rate_;
    for (Eigen::Index i = 0; i + 1 < m_; ++i) v -= 0.5 * std::log1p(gap(i) * d[i]);
    return v;
  }

  /// f(D) with f[0] the rate constraint and f[i+1] the chain constraint of D_i.
  Vector constraints(const Vector& d) const {
    Vector f(m_ + 1);
    f[0] = rate_constraint(d);
    for (Eigen::Index i = 0; i < m_; ++i) f[i + 1] = d[i] - chain_bound(d, i);
    return f;
  }

  bool in_domain(const Vector& d) const { return (d.array() > 0.0).all() && d.allFinite(); }

  /// Jacobian of f, (M+1) x M.
  Eigen::MatrixXd jacobian(const Vector& d) const {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m_ + 1, m_);
    for (Eigen::Index i = 0; i + 1 < m_; ++i) j(0, i) = -0.5 * gap(i) / (1.0 + gap(i) * d[i]);
    j(0, m_ - 1) = -0.5 / d[m_ - 1];
    for (Eigen::Index i = 0; i < m_; ++i) {
      j(i + 1, i) = 1.0;
      if (i > 0) {
        const double q = 1.0 + step_[i] * d[i - 1];
        j(i + 1, i - 1) = -1.0 / (q * q);
      }
    }
    return j;
  }

  /// Hessian of mu f_0 + sum_i lambda_i f_i; diagonal because each
  /// constraint depends nonlinearly on a single coordinate.
  Vector weighted_hessian_diagonal(const Vector& d, double mu, const Vector& lambda) const {
    Vector h = Vector::Zero(m_);
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      const double q = 1.0 + gap(i) * d[i];
      h[i] += mu * 0.5 * gap(i) * gap(i) / (q * q);
      h[i] += lambda[i + 1] * 2.0 * gap(i) / (q * q * q);
    }
    h[m_ - 1] += mu * 0.5 / (d[m_ - 1] * d[m_ - 1]);
    return h;
  }

  /// dL/dD_i written term by term as in the stationarity conditions.
  Vector lagrangian_gradient(const Vector& d, double mu, const Vector& lambda) const {
    Vector g(m_);
    for (Eigen::Index i = 0; i + 1 < m_; ++i) {
      const double q = 1.0 + gap(i) * d[i];
      g[i] = p_[i] + lambda[i] - lambda[i + 1] / (q * q) - 0.5 * mu * gap(i) / q;
    }
    g[m_ - 1] = p_[m_ - 1] + lambda[m_ - 1] - 0.5 * mu / d[m_ - 1];
    return g;
  }

 private:
  Vector p_;
  Eigen::Index m_;
  double base_;
  double sigma2_;
  double rate_;
  Vector step_;
};

}  // namespace mestd::detail
