// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "yamabe/error.hpp"
#include "yamabe/integrator.hpp"

using namespace yamabe;

namespace {

const Rhs2 kOscillator = [](double, const State2& y) -> State2 { return {y[1], -y[0]}; };

double fixed_error(double h) {
  StepControl c;
  c.fixed_step = h;
  DormandPrince dp(c);
  const auto y = dp.integrate(kOscillator, 0.0, {1.0, 0.0}, 2.0, [](const DenseStep&) {});
  return std::hypot(y[0] - std::cos(2.0), y[1] + std::sin(2.0));
}

} // namespace

TEST_CASE("fixed-step order is five on a smooth problem") {
  const double e1 = fixed_error(0.1), e2 = fixed_error(0.05), e3 = fixed_error(0.025);
  const double order1 = std::log2(e1 / e2), order2 = std::log2(e2 / e3);
  CHECK(order1 > 4.5);
  CHECK(order2 > 4.5);
  CHECK(order1 < 5.5);
}

TEST_CASE("adaptive accuracy follows the tolerance") {
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    StepControl c;
    c.rel_tol = c.abs_tol = tol;
    DormandPrince dp(c);
    const auto y = dp.integrate(kOscillator, 0.0, {1.0, 0.0}, 10.0, [](const DenseStep&) {});
    CHECK(std::abs(y[0] - std::cos(10.0)) < 200 * tol);
    CHECK(dp.stats().accepted > 0);
  }
}

TEST_CASE("dense output interpolates between steps") {
  StepControl c;
  c.rel_tol = c.abs_tol = 1e-12;
  DormandPrince dp(c);
  double worst = 0;
  dp.integrate(kOscillator, 0.0, {1.0, 0.0}, 6.0, [&](const DenseStep& s) {
    for (int i = 0; i <= 8; ++i) {
      const double t = s.t0 + (s.t1 - s.t0) * i / 8.0;
      worst = std::max(worst, std::abs(s(t)[0] - std::cos(t)));
    }
    CHECK(s(s.t0)[0] == doctest::Approx(s.y0[0]).epsilon(1e-14));
    CHECK(s(s.t1)[0] == doctest::Approx(s.y1[0]).epsilon(1e-13));
  });
  CHECK(worst < 1e-9);
}

TEST_CASE("steps land on requested stops") {
  StepControl c;
  c.rel_tol = c.abs_tol = 1e-8;
  for (int i = 1; i < 50; ++i) c.stops.push_back(0.1 * i);
  DormandPrince dp(c);
  std::vector<double> ends;
  dp.integrate(kOscillator, 0.0, {1.0, 0.0}, 5.0, [&](const DenseStep& s) { ends.push_back(s.t1); });
  for (double stop : c.stops) {
    const bool hit = std::find(ends.begin(), ends.end(), stop) != ends.end();
    CHECK(hit);
  }
  CHECK(ends.back() == 5.0);
}

TEST_CASE("failures are reported as integration failures") {
  StepControl c;
  c.max_steps = 10;
  c.rel_tol = c.abs_tol = 1e-12;
  DormandPrince dp(c);
  try {
    dp.integrate(kOscillator, 0.0, {1.0, 0.0}, 100.0, [](const DenseStep&) {});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IntegrationFailure);
  }

  StepControl f;
  f.fixed_step = 0.5;
  DormandPrince blow(f);
  const Rhs2 explode = [](double, const State2& y) -> State2 { return {y[0] * y[0] * 1e3, 0.0}; };
  CHECK_THROWS_AS(blow.integrate(explode, 0.0, {1e3, 0.0}, 10.0, [](const DenseStep&) {}), Error);
}

TEST_CASE("empty interval returns the initial state") {
  DormandPrince dp(StepControl{});
  int calls = 0;
  const auto y = dp.integrate(kOscillator, 1.0, {2.0, 3.0}, 1.0, [&](const DenseStep&) { ++calls; });
  CHECK(y[0] == 2.0);
  CHECK(calls == 0);
}
