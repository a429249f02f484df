#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "mestd/error.hpp"

namespace mestd {

using Vector = Eigen::VectorXd;

/// Gaussian source X ~ N(0, sigma2) described at `rate` nats per symbol.
struct SourceModel {
  double sigma2 = 1.0;
  double rate = 0.0;

  SourceModel() = default;
  SourceModel(double sigma2_x, double rate_budget);

  double precision() const { return 1.0 / sigma2; }
};

/// Probability mass function of the side-information channel power gain.
///
/// States are linear power gains in strictly ascending order starting at a
/// nonnegative value; probabilities are nonnegative and sum to one.
class DiscreteFading {
 public:
  static constexpr double kProbSumTolerance = 1e-12;

  DiscreteFading(Vector states, Vector probs);

  Eigen::Index size() const { return states_.size(); }
  const Vector& states() const { return states_; }
  const Vector& probs() const { return probs_; }
  double state(Eigen::Index i) const { return states_[i]; }
  double prob(Eigen::Index i) const { return probs_[i]; }

 private:
  Vector states_;
  Vector probs_;
};

/// Throws unless `states` and `probs` satisfy every DiscreteFading invariant.
/// Equal adjacent states are rejected rather than merged.
void validate_discrete(const Vector& states, const Vector& probs);
inline void validate_discrete(const DiscreteFading& fading) {
  validate_discrete(fading.states(), fading.probs());
}

struct Rician {
  double k = 0.0;     // line-of-sight to scattered power ratio
  double mean = 1.0;  // average power gain
};

struct Nakagami {
  double m = 1.0;
  double mean = 1.0;
};

struct Rayleigh {
  double mean = 1.0;
};

/// Log-normal gain: log s ~ N(location, scale^2).
struct LogNormal {
  double location = 0.0;
  double scale = 1.0;
};

/// Piecewise-linear density through (gains[k], values[k]), zero outside the
/// sampled support and rescaled to unit mass.
struct Tabulated {
  std::vector<double> gains;
  std::vector<double> values;
};

class ContinuousFading {
 public:
  using Family = std::variant<Rician, Nakagami, Rayleigh, LogNormal, Tabulated>;

  explicit ContinuousFading(Family family);

  static ContinuousFading rician(double k, double mean) { return ContinuousFading(Rician{k, mean}); }
  static ContinuousFading nakagami(double m, double mean) { return ContinuousFading(Nakagami{m, mean}); }
  static ContinuousFading rayleigh(double mean) { return ContinuousFading(Rayleigh{mean}); }
  static ContinuousFading lognormal(double location, double scale) {
    return ContinuousFading(LogNormal{location, scale});
  }
  static ContinuousFading tabulated(std::vector<double> gains, std::vector<double> values) {
    return ContinuousFading(Tabulated{std::move(gains), std::move(values)});
  }

  const Family& family() const { return family_; }
  std::string name() const;

  /// Density at s >= 0. Throws NegativeGain for s < 0.
  double pdf(double s) const;

  /// Mass on [a, b]; b may be +infinity.
  double mass(double a, double b) const;

  /// Characteristic gain scale used to seed truncation searches.
  double scale() const;

  /// Right end of the support, or +infinity.
  double support_end() const;

  /// Integrating a piecewise-linear table is exact when split at its knots.
  const std::vector<double>* knots() const;

 private:
  Family family_;
};

/// Free-function form of ContinuousFading::pdf.
inline double pdf_eval(const ContinuousFading& fading, double s) { return fading.pdf(s); }

/// Nakagami shape that matches the first two moments of a Rician K-factor.
inline double nakagami_m_from_rician(double k) { return (k + 1.0) * (k + 1.0) / (2.0 * k + 1.0); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Optimal layered allocation for a discrete fading pmf.
struct LayeredSolution {
  Vector distortions;
  Vector variances;
  Vector rates;
  Vector coefficients;
  double expected_distortion = 0.0;
  Vector dual_lambda;
  double dual_mu = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Single-layer allocation R(s) = R_X delta(s - s_a) for a continuous pdf.
struct SingleLayerSolution {
  double s_a = 0.0;
  double mu = 0.0;
  double expected_distortion = 0.0;
  double certificate_min_lambda = 0.0;
  double certificate_balance = 0.0;
  double s_b = 0.0;    // right end of the {f >= mu/2} superlevel set
  double s_cut = 0.0;  // truncation point used for semi-infinite integrals
};

}  // namespace mestd
