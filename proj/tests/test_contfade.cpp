#include <doctest.h>

#include <cmath>

#include "mestd/contfade.hpp"
#include "mestd/specfun.hpp"

using namespace mestd;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidParameter;
}

}  // namespace

TEST_CASE("Rayleigh optimum sits at zero gain") {
  for (double rate : {0.1, 1.0, 3.0}) {
    for (double sigma2 : {0.5, 1.0, 4.0}) {
      const SourceModel src(sigma2, rate);
      const auto sol = solve_single_layer(ContinuousFading::rayleigh(1.0), src);
      CHECK(sol.s_a == 0.0);
      CHECK(std::abs(sol.expected_distortion - rayleigh_closed_form(1.0, src)) < 1e-9);
    }
  }
}

TEST_CASE("Rician single-layer optimum against an independent solve") {
  struct Ref {
    double k, rate, s_a, mu, ed;
  };
  // scipy quad + brentq on the same balance equation.
  const Ref refs[] = {
      {32.0, 0.25, 0.553369107238, 0.559860904402, 0.340422480553},
      {16.0, 1.0, 0.312228145857, 0.179168042412, 0.100529370005},
      {4.0, 0.5, 0.079957184156, 0.413118650356, 0.272444035511},
  };
  for (const auto& r : refs) {
    CAPTURE(r.k);
    const auto sol = solve_single_layer(ContinuousFading::rician(r.k, 1.0), SourceModel(1.0, r.rate));
    CHECK(std::abs(sol.s_a - r.s_a) < 1e-9);
    CHECK(std::abs(sol.mu - r.mu) < 1e-9);
    CHECK(std::abs(sol.expected_distortion - r.ed) < 1e-9);
    CHECK(sol.s_b > sol.s_a);
  }
}

TEST_CASE("uniform pdf takes the zero-gain branch") {
  const auto f = ContinuousFading::tabulated({0.0, 2.0}, {1.0, 1.0});
  for (double rate : {0.1, 1.0, 2.5}) {
    const auto sol = solve_single_layer(f, SourceModel(1.0, rate));
    CHECK(sol.s_a == 0.0);
  }
}

TEST_CASE("bimodal pdf is refused") {
  const auto f = ContinuousFading::tabulated({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 1.0, 0.1, 1.0, 0.0});
  CHECK(code_of([&] { solve_single_layer(f, SourceModel(1.0, 1.0)); }) == ErrorCode::NotQuasiconcave);
}

TEST_CASE("dual certificate for Rician instances") {
  for (double k : {0.0, 4.0, 32.0}) {
    CAPTURE(k);
    const auto f = ContinuousFading::rician(k, 1.0);
    const SourceModel src(1.0, 0.25);
    const auto sol = solve_single_layer(f, src);
    const auto cert = dual_certificate(f, sol, src);
    CHECK(std::abs(cert.lambda_at_sa) <= 1e-10);
    CHECK(cert.min_lambda >= -1e-9);
    CHECK(std::abs(cert.balance) <= 1e-6);
    CHECK(cert.gains.size() == cert.lambda.size());
  }
}

TEST_CASE("Rayleigh closed form") {
  CHECK(std::abs(rayleigh_closed_form(1.0, SourceModel(1.0, 0.0)) - 0.596347362323194074) < 1e-14);
  CHECK(std::abs(rayleigh_closed_form(1.0, SourceModel(1.0, 1.0)) - 0.120634109821031452) < 1e-14);
  CHECK(std::abs(rayleigh_closed_form(3.0, SourceModel(2.0, 0.5)) - 0.325649653452140254) < 1e-14);
  // The positive-exponent reading of the pdf is not normalizable; the corrected
  // pdf reproduces the closed form by quadrature.
  const auto q = integrate([](double s) { return std::exp(-s) / (s + std::exp(2.0)); }, 0.0, kInfinity, 1e-15);
  CHECK(std::abs(q.value - rayleigh_closed_form(1.0, SourceModel(1.0, 1.0))) < 1e-12);

  double prev = 0.0;
  for (double rate = 0.5; rate <= 12.0; rate += 0.5) {
    const double scaled = rayleigh_closed_form(1.0, SourceModel(1.0, rate)) * std::exp(2.0 * rate);
    CHECK(scaled > prev);
    CHECK(scaled < 1.0);
    prev = scaled;
  }
  CHECK(prev > 1.0 - 1e-9);
  CHECK_THROWS_AS(rayleigh_closed_form(0.0, SourceModel(1.0, 1.0)), Error);
}

TEST_CASE("distortion profile") {
  const SourceModel src(2.0, 0.75);
  const DistortionProfile prof(0.4, src);
  CHECK(prof.distortion(0.0) == 2.0);
  const double below = 1.0 / (0.4 + 0.5);
  const double above = prof.distortion(0.4);
  CHECK(std::abs(below / above - std::exp(1.5)) < 1e-13);
  CHECK(std::abs(prof.jump_rate() - 0.75) < 1e-14);
  for (double s : {0.0, 0.2, 0.39, 0.41, 1.0, 5.0}) {
    CHECK(std::abs(continuous_rate_density(prof, s)) < 1e-15);
    CHECK(prof.derivative(s) < 0.0);
  }
  CHECK(code_of([&] { continuous_rate_density(prof, 0.4); }) == ErrorCode::AtDiscontinuity);
  CHECK(std::abs(total_rate(prof) - 0.75) < 1e-12);
}

TEST_CASE("two-piece expected distortion equals generic quadrature") {
  const auto f = ContinuousFading::rician(16.0, 1.0);
  const SourceModel src(1.0, 0.5);
  for (double s_a : {0.0, 0.2, 0.45, 0.9}) {
    const DistortionProfile prof(s_a, src);
    auto h = [&](double s) { return f.pdf(s) * prof.distortion(s); };
    double generic = integrate(h, 0.0, std::max(s_a, 1e-300), 1e-14).value;
    generic += integrate(h, s_a, 3.0, 1e-14).value + integrate(h, 3.0, kInfinity, 1e-14).value;
    CHECK(std::abs(single_layer_expected_distortion(f, src, s_a) - generic) < 1e-8);
  }
}

TEST_CASE("balance function changes sign at the optimum") {
  const auto f = ContinuousFading::rician(32.0, 1.0);
  const SourceModel src(1.0, 0.25);
  const auto sol = solve_single_layer(f, src);
  CHECK(single_layer_balance(f, src, 0.0, sol.s_cut) > 0.0);
  CHECK(std::abs(single_layer_balance(f, src, sol.s_a, sol.s_cut)) < 1e-10);
  CHECK(single_layer_balance(f, src, sol.s_a + 0.05, sol.s_cut) < 0.0);
}

TEST_CASE("target gain is monotone in K and rate") {
  const double rates[] = {0.25, 0.5, 1.0, 2.0};
  std::vector<std::vector<double>> s_a;
  for (double rate : rates) {
    std::vector<double> row;
    for (double k : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
      row.push_back(solve_single_layer(ContinuousFading::rician(k, 1.0), SourceModel(1.0, rate)).s_a);
    }
    for (std::size_t j = 1; j < row.size(); ++j) CHECK(row[j] >= row[j - 1]);
    s_a.push_back(row);
  }
  for (std::size_t i = 1; i < s_a.size(); ++i) {
    for (std::size_t j = 0; j < s_a[i].size(); ++j) CHECK(s_a[i][j] <= s_a[i - 1][j]);
  }
}

TEST_CASE("Nakagami targets a higher gain than the matched Rician") {
  for (double k : {4.0, 16.0, 32.0}) {
    const SourceModel src(1.0, 0.25);
    const auto ric = solve_single_layer(ContinuousFading::rician(k, 1.0), src);
    const auto nak = solve_single_layer(ContinuousFading::nakagami(nakagami_m_from_rician(k), 1.0), src);
    CHECK(nak.s_a >= ric.s_a);
  }
}

TEST_CASE("distortion exponent approaches one from above") {
  const std::vector<double> rates{1.0, 2.0, 4.0, 8.0};
  for (const auto& f : {ContinuousFading::rayleigh(1.0), ContinuousFading::rician(16.0, 1.0)}) {
    const auto e = distortion_exponent(f, SourceModel(1.0, 1.0), rates);
    REQUIRE(e.size() == 4);
    for (std::size_t k = 0; k < e.size(); ++k) {
      // E[D] <= sigma^2 e^{-2R}, so the ratio cannot drop below one at sigma^2 = 1.
      CHECK(e[k] >= 1.0 - 1e-12);
      if (k > 0) CHECK(e[k] <= e[k - 1] + 1e-12);
    }
    CHECK(e[3] >= 0.85);
    CHECK(e[3] - 1.0 < 1e-3);
  }
  CHECK_THROWS_AS(distortion_exponent(ContinuousFading::rayleigh(1.0), SourceModel(1.0, 1.0), {2.0, 1.0}), Error);
}

TEST_CASE("truncation and mode helpers") {
  const auto f = ContinuousFading::rician(32.0, 1.0);
  const double s_cut = truncation_point(f);
  CHECK(f.mass(s_cut, kInfinity) < 1e-10);
  CHECK(f.mass(s_cut / 2.0, kInfinity) >= 1e-10);
  const double mode = locate_mode(f, s_cut);
  CHECK(f.pdf(mode) >= f.pdf(mode - 1e-4));
  CHECK(f.pdf(mode) >= f.pdf(mode + 1e-4));
  CHECK(locate_mode(ContinuousFading::rayleigh(1.0), 30.0) == 0.0);
}
