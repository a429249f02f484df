#include "mestd/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mestd/specfun.hpp"

namespace mestd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void normalize(Tabulated& t) {
  require(t.gains.size() >= 2 && t.gains.size() == t.values.size(),
          "tabulated pdf needs at least two (gain, value) samples of equal length");
  require(std::isfinite(t.gains.front()) && t.gains.front() >= 0.0, "tabulated gains must start at >= 0");
  double area = 0.0;
  for (std::size_t k = 0; k < t.gains.size(); ++k) {
    require(std::isfinite(t.values[k]) && t.values[k] >= 0.0, "tabulated pdf values must be >= 0");
    if (k > 0) {
      require(std::isfinite(t.gains[k]) && t.gains[k] > t.gains[k - 1], "tabulated gains must ascend strictly");
      area += 0.5 * (t.values[k] + t.values[k - 1]) * (t.gains[k] - t.gains[k - 1]);
    }
  }
  require(area > 0.0, "tabulated pdf has zero mass");
  for (double& v : t.values) v /= area;
}

double tabulated_pdf(const Tabulated& t, double s) {
  if (s < t.gains.front() || s > t.gains.back()) return 0.0;
  const auto it = std::upper_bound(t.gains.begin(), t.gains.end(), s);
  if (it == t.gains.end()) return t.values.back();
  const auto k = static_cast<std::size_t>(it - t.gains.begin());
  const double w = (s - t.gains[k - 1]) / (t.gains[k] - t.gains[k - 1]);
  return (1.0 - w) * t.values[k - 1] + w * t.values[k];
}

double tabulated_mass(const Tabulated& t, double a, double b) {
  double total = 0.0;
  for (std::size_t k = 1; k < t.gains.size(); ++k) {
    const double l = std::max(a, t.gains[k - 1]);
    const double r = std::min(b, t.gains[k]);
    if (r <= l) continue;
    total += 0.5 * (tabulated_pdf(t, l) + tabulated_pdf(t, r)) * (r - l);
  }
  return total;
}

}  // namespace

SourceModel::SourceModel(double sigma2_x, double rate_budget) : sigma2(sigma2_x), rate(rate_budget) {
  require(finite_positive(sigma2), "source variance must be positive");
  require(std::isfinite(rate) && rate >= 0.0, "rate budget must be nonnegative");
}

void validate_discrete(const Vector& states, const Vector& probs) {
  if (states.size() < 1 || states.size() != probs.size()) {
    throw Error(ErrorCode::InvalidStateCount, "states and probs must be nonempty and of equal length");
  }
  if (!(std::isfinite(states[0]) && states[0] >= 0.0)) {
    throw Error(ErrorCode::NonAscendingStates, "first state must be a finite gain >= 0");
  }
  for (Eigen::Index i = 1; i < states.size(); ++i) {
    if (!(std::isfinite(states[i]) && states[i] > states[i - 1])) {
      throw Error(ErrorCode::NonAscendingStates,
                  "state " + std::to_string(i) + " does not exceed its predecessor");
    }
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw Error(ErrorCode::NegativeProbability, "probability " + std::to_string(i) + " is negative");
    }
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > DiscreteFading::kProbSumTolerance) {
    throw Error(ErrorCode::ProbSumMismatch, "probabilities sum to " + std::to_string(total));
  }
}

DiscreteFading::DiscreteFading(Vector states, Vector probs)
    : states_(std::move(states)), probs_(std::move(probs)) {
  validate_discrete(states_, probs_);
}

ContinuousFading::ContinuousFading(Family family) : family_(std::move(family)) {
  std::visit(Overloaded{
                 [](const Rician& r) {
                   require(std::isfinite(r.k) && r.k >= 0.0, "Rician K must be >= 0");
                   require(finite_positive(r.mean), "Rician mean gain must be > 0");
                 },
                 [](const Nakagami& n) {
                   require(std::isfinite(n.m) && n.m >= 0.5, "Nakagami m must be >= 0.5");
                   require(finite_positive(n.mean), "Nakagami mean gain must be > 0");
                 },
                 [](const Rayleigh& r) { require(finite_positive(r.mean), "Rayleigh mean gain must be > 0"); },
                 [](const LogNormal& l) {
                   require(std::isfinite(l.location), "log-normal location must be finite");
                   require(finite_positive(l.scale), "log-normal scale must be > 0");
                 },
                 [](const Tabulated&) {},
             },
             family_);
  if (auto* t = std::get_if<Tabulated>(&family_)) normalize(*t);
}

std::string ContinuousFading::name() const {
  return std::visit(Overloaded{
                        [](const Rician&) { return std::string("rician"); },
                        [](const Nakagami&) { return std::string("nakagami"); },
                        [](const Rayleigh&) { return std::string("rayleigh"); },
                        [](const LogNormal&) { return std::string("lognormal"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    family_);
}

double ContinuousFading::pdf(double s) const {
  if (s < 0.0) throw Error(ErrorCode::NegativeGain, "pdf evaluated at s < 0");
  return std::visit(
      Overloaded{
          [s](const Rician& r) {
            const double a = (1.0 + r.k) / r.mean;
            const double x = 2.0 * std::sqrt(r.k * a * s);
            // -K - a s + x == -(sqrt(K) - sqrt(a s))^2 keeps the exponent bounded.
            const double d = std::sqrt(r.k) - std::sqrt(a * s);
            return a * std::exp(-d * d) * bessel_i0_scaled(x);
          },
          [s](const Nakagami& n) {
            const double rate = n.m / n.mean;
            if (s == 0.0) {
              if (n.m > 1.0) return 0.0;
              if (n.m == 1.0) return rate;
              return kInfinity;
            }
            return std::exp(n.m * std::log(rate) + (n.m - 1.0) * std::log(s) - rate * s - log_gamma(n.m));
          },
          [s](const Rayleigh& r) { return std::exp(-s / r.mean) / r.mean; },
          [s](const LogNormal& l) {
            if (s == 0.0) return 0.0;
            const double z = (std::log(s) - l.location) / l.scale;
            return std::exp(-0.5 * z * z) / (s * l.scale * std::sqrt(2.0 * std::numbers::pi));
          },
          [s](const Tabulated& t) { return tabulated_pdf(t, s); },
      },
      family_);
}

double ContinuousFading::mass(double a, double b) const {
  a = std::max(a, 0.0);
  if (!(b > a)) return 0.0;
  if (const auto* r = std::get_if<Rayleigh>(&family_)) {
    const double upper = std::isinf(b) ? 0.0 : std::exp(-b / r->mean);
    return std::exp(-a / r->mean) - upper;
  }
  if (const auto* t = std::get_if<Tabulated>(&family_)) return tabulated_mass(*t, a, b);
  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  opts.rel_tol = 1e-13;
  const auto res = integrate([this](double s) { return pdf(s); }, a, b, opts);
  if (!res.converged && res.abs_error_estimate > 1e-11) {
    throw Error(ErrorCode::QuadratureFailure, "probability mass integral did not converge");
  }
  return res.value;
}

double ContinuousFading::scale() const {
  return std::visit(Overloaded{
                        [](const Rician& r) { return r.mean; },
                        [](const Nakagami& n) { return n.mean; },
                        [](const Rayleigh& r) { return r.mean; },
                        [](const LogNormal& l) { return std::exp(l.location + 0.5 * l.scale * l.scale); },
                        [](const Tabulated& t) { return t.gains.back(); },
                    },
                    family_);
}

double ContinuousFading::support_end() const {
  if (const auto* t = std::get_if<Tabulated>(&family_)) return t->gains.back();
  return kInfinity;
}

const std::vector<double>* ContinuousFading::knots() const {
  if (const auto* t = std::get_if<Tabulated>(&family_)) return &t->gains;
  return nullptr;
}

}  // namespace mestd
