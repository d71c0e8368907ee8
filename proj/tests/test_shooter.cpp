// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "yamabe/error.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/shooter.hpp"

using namespace yamabe;

namespace {

const ProblemParams kYamabe = yamabe_problem(2, 1.0);

/// Bisection on w(π/2) over [lo, hi] using nothing but integrate_half.
double bisect_midpoint_zero(double lo, double hi) {
  const IntegratorConfig cfg;
  double flo = integrate_half(kYamabe, cfg, lo).w_mid;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = integrate_half(kYamabe, cfg, mid).w_mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("nonlinearity") {
  CHECK(nonlinearity(1.0, 4.0) == 0.0);
  CHECK(nonlinearity(0.0, 3.0) == 0.0);
  CHECK(nonlinearity(-1.0, 3.7) == 0.0);
  CHECK(nonlinearity(2.0, 4.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(nonlinearity(-2.0, 3.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(nonlinearity(0.5, 2.5) == doctest::Approx(std::pow(0.5, 1.5) - 0.5).epsilon(1e-15));
}

TEST_CASE("startup expansion") {
  const auto one = startup_expansion(kYamabe, 1.0, 1e-4);
  CHECK(one.w == 1.0);
  CHECK(one.wp == 0.0);

  // c = -(1/3)(8 - 2)/2 = -1.
  const double eps = 1e-4;
  const auto two = startup_expansion(kYamabe, 2.0, eps);
  CHECK(std::abs(two.w - (2.0 - eps * eps / 2)) < 1e-14);
  CHECK(std::abs(two.wp + eps) < 1e-11);

  // Against a tight integration started much closer to r = 0.
  const auto forcing = oracle::yamabe_forcing(1.0 / 3.0, 4.0);
  for (double alpha : {2.0, 5.0, 12.0}) {
    for (double e : {1e-3, 5e-4}) {
      const auto ref = oracle::radial(2, forcing, alpha, {e})[0];
      const auto s = startup_expansion(kYamabe, alpha, e);
      const double scale = std::abs(nonlinearity(alpha, 4.0));
      CHECK(std::abs(s.w - ref[0]) <= 1e-12 * scale + 1e-14);
      CHECK(std::abs(s.wp - ref[1]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("constant and zero data give constant solutions") {
  const IntegratorConfig cfg;
  const auto one = integrate_half(kYamabe, cfg, 1.0);
  CHECK(one.zeros_half == 0);
  CHECK(one.w_mid == 1.0);
  CHECK(one.wp_mid == 0.0);
  for (double w : one.trajectory.w) CHECK(w == 1.0);
  const auto zero = integrate_half(kYamabe, cfg, 0.0);
  for (double w : zero.trajectory.w) CHECK(w == 0.0);
  CHECK(zero.zeros_half == 0);
}

TEST_CASE("below the threshold shots stay positive on (0, pi/2)") {
  const IntegratorConfig cfg;
  for (int i = 1; i <= 20; ++i) {
    const double alpha = std::sqrt(2.0) * i / 20.0;
    const auto shot = integrate_half(kYamabe, cfg, alpha);
    CHECK(shot.zeros_half == 0);
    for (double w : shot.trajectory.w) CHECK(w > 0);
  }
  CHECK(integrate_half(kYamabe, cfg, 1.2).zeros_half == 0);
}

TEST_CASE("shots agree with an independent integrator") {
  const IntegratorConfig cfg;
  const auto forcing = oracle::yamabe_forcing(1.0 / 3.0, 4.0);
  for (double alpha : {1.3, 4.0, 9.0, 20.0}) {
    const auto shot = integrate_half(kYamabe, cfg, alpha);
    std::vector<double> at;
    for (std::size_t i = 8; i < shot.trajectory.size(); i += 8) at.push_back(shot.trajectory.grid[i]);
    const auto ref = oracle::radial(2, forcing, alpha, at);
    double worst = 0;
    for (std::size_t j = 0; j < at.size(); ++j) {
      worst = std::max(worst, std::abs(shot.trajectory.w[8 * (j + 1)] - ref[j][0]) / alpha);
    }
    CHECK(worst < 1e-9);
  }
  CHECK(integrate_half(kYamabe, cfg, 9.0).zeros_half >= 1);
}

TEST_CASE("the equation is odd in w") {
  const IntegratorConfig cfg;
  for (double alpha : {0.7, 3.3, 11.0}) {
    const auto plus = integrate_half(kYamabe, cfg, alpha);
    const auto minus = integrate_half(kYamabe, cfg, -alpha);
    REQUIRE(plus.trajectory.size() == minus.trajectory.size());
    for (std::size_t i = 0; i < plus.trajectory.size(); ++i)
      CHECK(std::abs(plus.trajectory.w[i] + minus.trajectory.w[i]) <= 1e-12 * alpha);
    CHECK(plus.zeros_half == minus.zeros_half);
  }
}

TEST_CASE("energy") {
  const IntegratorConfig cfg;
  const double mu = 1.0 / 3.0, p = 4.0;
  const auto flat = energy_profile(integrate_half(kYamabe, cfg, 1.0).trajectory);
  for (double e : flat.energy) CHECK(e == doctest::Approx(mu * (1 / p - 0.5)).epsilon(1e-15));

  const auto at_threshold = energy_profile(integrate_half(kYamabe, cfg, std::sqrt(2.0)).trajectory);
  CHECK(std::abs(at_threshold.initial) < 1e-15);

  for (double alpha : {1.1, 2.0, 6.0, 30.0}) {
    const auto shot = integrate_half(kYamabe, cfg, alpha);
    const auto e = energy_profile(shot.trajectory);
    CHECK(e.energy.front() == doctest::Approx(e.initial).epsilon(1e-12));
    for (std::size_t i = 1; i < e.energy.size(); ++i) CHECK(e.energy[i] <= e.energy[i - 1] + 1e-8);
    // At a zero the energy is ½w'² > 0, so every zero is simple.
    const auto profile = Profile::from_trajectory(shot.trajectory);
    for (double z : shot.zeros) {
      CHECK(std::abs(profile.value(z)) < 1e-8 * alpha);
      CHECK(std::abs(profile.d1(z)) > 1e-3);
    }
  }
}

TEST_CASE("reflection across pi/2") {
  const IntegratorConfig cfg;
  const auto flat = extend_by_symmetry(integrate_half(kYamabe, cfg, 1.0), Symmetry::Even);
  CHECK(flat.grid.back() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  for (double w : flat.w) CHECK(w == 1.0);

  // First α above the threshold with w(π/2) = 0: one zero on [0, π].
  const double a0 = bisect_midpoint_zero(1.5, 5.0);
  const auto shot = integrate_half(kYamabe, cfg, a0);
  const auto odd = extend_by_symmetry(shot, Symmetry::Odd, 1e-9);
  CHECK(count_sign_changes(odd.w) == 2 * shot.zeros_half + 1);
  CHECK(std::abs(odd.wp.back()) < 1e-12);
  const std::size_t m = odd.size() - 1;
  for (std::size_t i = 0; i <= m; ++i) {
    CHECK(odd.w[m - i] == doctest::Approx(-odd.w[i]).epsilon(1e-12));
    CHECK(odd.grid[m - i] == doctest::Approx(std::numbers::pi - odd.grid[i]).epsilon(1e-14));
  }

  CHECK_THROWS_AS(extend_by_symmetry(integrate_half(kYamabe, cfg, 3.0), Symmetry::Odd), Error);
  try {
    extend_by_symmetry(integrate_half(kYamabe, cfg, 3.0), Symmetry::Even);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SymmetryPreconditionViolated);
  }
}

TEST_CASE("sign changes") {
  CHECK(count_sign_changes({}) == 0);
  CHECK(count_sign_changes({1, -1, 1}) == 2);
  CHECK(count_sign_changes({1, 0, -1}) == 1);
  CHECK(count_sign_changes({1, 0, 1}) == 0);
  CHECK(count_sign_changes({-1, -2, 0, 0, 3}) == 1);
}

TEST_CASE("startup offset consistency") {
  const IntegratorConfig cfg;
  for (double alpha : {2.0, 10.0, 25.0}) CHECK(startup_consistency(kYamabe, cfg, alpha) < 1e-9 * alpha);
}

TEST_CASE("two-sided shooting recovers a symmetric solution") {
  const IntegratorConfig cfg;
  const double a0 = bisect_midpoint_zero(1.5, 5.0);
  const auto sol = solve_two_sided(kYamabe, cfg, a0 * 1.01, -a0 * 0.99);
  CHECK(sol.alpha_left == doctest::Approx(a0).epsilon(1e-9));
  CHECK(sol.alpha_right == doctest::Approx(-a0).epsilon(1e-9));
  CHECK(sol.mismatch < 1e-10);
  CHECK(count_sign_changes(sol.trajectory.w) == 1);

  const auto trivial = solve_two_sided(kYamabe, cfg, 1.0, 1.0);
  CHECK(trivial.iterations == 0);
}

TEST_CASE("configuration checks") {
  IntegratorConfig bad;
  bad.eps_start = 0.2;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = {};
  bad.rel_tol = 0;
  CHECK_THROWS_AS(validate(bad), Error);

  IntegratorConfig tiny;
  tiny.max_steps = 5;
  try {
    integrate_half(kYamabe, tiny, 40.0);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IntegrationFailure);
  }
}
