#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mestd/error.hpp"
#include "mestd/specfun.hpp"

namespace mestd {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
};

// QUADPACK qk15 estimate on [a, b].
Segment gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{};
  std::array<double, 7> fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double scale = std::abs(half);
  resk *= half;
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg * half));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk, err};
}

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

constexpr int kInitialPieces = 8;

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  if (!(a < b)) throw Error(ErrorCode::InvalidParameter, "integrate requires a < b");

  std::function<double(double)> g;
  double lo = a;
  double hi = b;
  if (std::isinf(b)) {
    g = [&f, a](double u) {
      const double w = 1.0 - u;
      return f(a + u / w) / (w * w);
    };
    lo = 0.0;
    hi = 1.0;
  } else {
    g = f;
  }

  QuadratureResult out;
  std::vector<Segment> heap;
  std::vector<Segment> retired;  // segments too narrow to split further
  const double width = (hi - lo) / kInitialPieces;
  for (int k = 0; k < kInitialPieces; ++k) {
    const double l = lo + k * width;
    const double r = (k + 1 == kInitialPieces) ? hi : lo + (k + 1) * width;
    heap.push_back(gauss_kronrod15(g, l, r));
  }
  out.evaluations = 15 * kInitialPieces;
  std::make_heap(heap.begin(), heap.end(), ByError{});

  auto totals = [&](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    for (const auto& s : heap) {
      value += s.value;
      error += s.error;
    }
    for (const auto& s : retired) {
      value += s.value;
      error += s.error;
    }
  };

  double value = 0.0;
  double error = 0.0;
  totals(value, error);
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    if (heap.empty() || out.evaluations + 30 > opts.max_evaluations) break;
    std::pop_heap(heap.begin(), heap.end(), ByError{});
    const Segment worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) {
      retired.push_back(worst);
      continue;
    }
    const Segment left = gauss_kronrod15(g, worst.a, mid);
    const Segment right = gauss_kronrod15(g, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), ByError{});
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), ByError{});
  }
  totals(value, error);
  out.value = value;
  out.abs_error_estimate = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return out;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
  const auto res = integrate(f, a, b, opts);
  if (!res.converged) {
    throw Error(ErrorCode::ToleranceNotReached,
                "estimate " + std::to_string(res.value) + " with error " +
                    std::to_string(res.abs_error_estimate));
  }
  return res.value;
}

}  // namespace mestd
