#include <doctest.h>

#include <cmath>

#include "mestd/contfade.hpp"
#include "mestd/model.hpp"
#include "mestd/specfun.hpp"

using namespace mestd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

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

TEST_CASE("SourceModel validation") {
  const SourceModel src(2.0, 0.5);
  CHECK(src.precision() == 0.5);
  CHECK(code_of([] { SourceModel(0.0, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { SourceModel(1.0, -0.1); }) == ErrorCode::InvalidParameter);
  CHECK_NOTHROW(SourceModel(1.0, 0.0));
}

TEST_CASE("DiscreteFading validation") {
  CHECK_NOTHROW(DiscreteFading(vec({0.0, 1.0, 3.0}), vec({0.2, 0.3, 0.5})));
  CHECK(code_of([] { DiscreteFading(vec({1.0, 1.0}), vec({0.5, 0.5})); }) == ErrorCode::NonAscendingStates);
  CHECK(code_of([] { DiscreteFading(vec({2.0, 1.0}), vec({0.5, 0.5})); }) == ErrorCode::NonAscendingStates);
  CHECK(code_of([] { DiscreteFading(vec({1.0, 2.0}), vec({0.5, 0.6})); }) == ErrorCode::ProbSumMismatch);
  CHECK(code_of([] { DiscreteFading(vec({1.0, 2.0}), vec({-0.1, 1.1})); }) == ErrorCode::NegativeProbability);
  CHECK(code_of([] { DiscreteFading(vec({-1.0, 2.0}), vec({0.5, 0.5})); }) == ErrorCode::NonAscendingStates);
  CHECK(code_of([] { DiscreteFading(vec({}), vec({})); }) == ErrorCode::InvalidStateCount);
  // The sum tolerance is tight but not exact.
  CHECK_NOTHROW(DiscreteFading(vec({1.0, 2.0}), vec({0.1, 0.9 + 1e-13})));
}

TEST_CASE("pdf families integrate to one") {
  const std::vector<ContinuousFading> families{
      ContinuousFading::rayleigh(1.0),        ContinuousFading::rayleigh(10.0),
      ContinuousFading::rician(0.0, 1.0),     ContinuousFading::rician(4.0, 2.0),
      ContinuousFading::rician(64.0, 1.0),    ContinuousFading::nakagami(0.7, 1.0),
      ContinuousFading::nakagami(1.0, 3.0),   ContinuousFading::nakagami(22.0, 1.0),
      ContinuousFading::lognormal(0.0, 0.5),  ContinuousFading::lognormal(1.0, 1.2),
      ContinuousFading::tabulated({0.0, 1.0, 2.0}, {0.0, 3.0, 0.0}),
  };
  for (const auto& f : families) {
    CAPTURE(f.name());
    const double s_cut = truncation_point(f);
    CHECK(std::abs(f.mass(0.0, s_cut) + f.mass(s_cut, kInfinity) - 1.0) <= 1e-8);
    CHECK(std::abs(f.mass(0.0, kInfinity) - 1.0) <= 1e-8);
  }
}

TEST_CASE("Rician with K = 0 is Rayleigh") {
  const auto ric = ContinuousFading::rician(0.0, 2.0);
  const auto ray = ContinuousFading::rayleigh(2.0);
  for (double s : {0.0, 0.3, 1.0, 4.0, 11.0}) CHECK(std::abs(ric.pdf(s) - ray.pdf(s)) <= 1e-15);
}

TEST_CASE("Rayleigh pdf decays") {
  const auto f = ContinuousFading::rayleigh(1.0);
  CHECK(f.pdf(0.0) == 1.0);
  CHECK(std::abs(f.pdf(2.0) - std::exp(-2.0)) <= 1e-16);
  CHECK(std::abs(f.mass(0.0, 1.0) - (1.0 - std::exp(-1.0))) <= 1e-15);
}

TEST_CASE("Nakagami with m = 1 is Rayleigh") {
  const auto nak = ContinuousFading::nakagami(1.0, 1.5);
  const auto ray = ContinuousFading::rayleigh(1.5);
  for (double s : {0.0, 0.3, 1.0, 4.0}) CHECK(std::abs(nak.pdf(s) - ray.pdf(s)) <= 1e-14);
}

TEST_CASE("Rician-matching Nakagami shape") {
  CHECK(nakagami_m_from_rician(0.0) == 1.0);
  CHECK(std::abs(nakagami_m_from_rician(32.0) - 33.0 * 33.0 / 65.0) < 1e-14);
}

TEST_CASE("pdf rejects negative gains") {
  const auto f = ContinuousFading::rician(4.0, 1.0);
  CHECK(code_of([&] { (void)f.pdf(-1e-3); }) == ErrorCode::NegativeGain);
}

TEST_CASE("family parameter validation") {
  CHECK(code_of([] { ContinuousFading::rician(-1.0, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { ContinuousFading::rayleigh(0.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { ContinuousFading::nakagami(0.4, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { ContinuousFading::lognormal(0.0, 0.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { ContinuousFading::tabulated({0.0, 0.0}, {1.0, 1.0}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("tabulated pdf is renormalized and interpolated") {
  const auto f = ContinuousFading::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK(std::abs(f.pdf(1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(f.pdf(0.5) - 0.5) <= 1e-15);
  CHECK(f.pdf(2.5) == 0.0);
  CHECK(std::abs(f.mass(0.0, 1.0) - 0.5) <= 1e-15);
  CHECK(f.support_end() == 2.0);
}

TEST_CASE("Rician pdf is quasiconcave") {
  for (double k : {0.0, 0.5, 2.0, 8.0, 32.0, 128.0}) {
    for (double mean : {0.5, 1.0, 10.0}) {
      const auto f = ContinuousFading::rician(k, mean);
      CHECK_NOTHROW(check_quasiconcave(f, truncation_point(f), 4096, 1e-12));
    }
  }
}

TEST_CASE("pdf_eval is deterministic") {
  const auto f = ContinuousFading::rician(16.0, 1.0);
  for (double s : {0.0, 0.77, 1.3}) CHECK(pdf_eval(f, s) == pdf_eval(f, s));
}

TEST_CASE("db conversion") {
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(std::abs(db_to_linear(10.0) - 10.0) < 1e-14);
  CHECK(std::abs(db_to_linear(-3.0) - 0.501187233627) < 1e-12);
}
