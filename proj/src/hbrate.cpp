#include "mestd/hbrate.hpp"

#include <cmath>

namespace mestd {

Vector no_rate_distortions(const DiscreteFading& fading, const SourceModel& src) {
  return (fading.states().array() + src.precision()).inverse().matrix();
}

double pareto_d2(double d1, const DiscreteFading& fading, const SourceModel& src) {
  if (fading.size() != 2) throw Error(ErrorCode::InvalidStateCount, "Pareto curve needs M = 2");
  const double base = src.precision() + fading.state(0);
  const double gain = std::exp(2.0 * src.rate);
  const double lo = 1.0 / (gain * base);
  const double hi = 1.0 / base;
  const double slack = 1e-12 * hi;
  if (!(d1 >= lo - slack && d1 <= hi + slack)) {
    throw Error(ErrorCode::OutOfParetoRange, "D1 = " + std::to_string(d1) + " outside [" +
                                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const double gap = fading.state(1) - fading.state(0);
  return 1.0 / (gain * base * (1.0 + gap * d1));
}

double no_si_distortion(const SourceModel& src) { return src.sigma2 * std::exp(-2.0 * src.rate); }

double wyner_ziv_distortion(const SourceModel& src, double s) {
  if (s < 0.0) throw Error(ErrorCode::NegativeGain, "Wyner-Ziv gain must be >= 0");
  return std::exp(-2.0 * src.rate) / (src.precision() + s);
}

}  // namespace mestd
