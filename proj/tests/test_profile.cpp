// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "yamabe/error.hpp"
#include "yamabe/profile.hpp"

using namespace yamabe;

TEST_CASE("Fornberg weights reproduce classic stencils") {
  const std::vector<double> three{-1, 0, 1};
  const auto w = fd_weights(0.0, three, 2);
  CHECK(w[0] == std::vector<double>{0, 1, 0});
  CHECK(w[1][0] == doctest::Approx(-0.5));
  CHECK(w[1][1] == doctest::Approx(0.0));
  CHECK(w[1][2] == doctest::Approx(0.5));
  CHECK(w[2][0] == doctest::Approx(1.0));
  CHECK(w[2][1] == doctest::Approx(-2.0));
  CHECK(w[2][2] == doctest::Approx(1.0));

  const std::vector<double> five{-2, -1, 0, 1, 2};
  const auto w5 = fd_weights(0.0, five, 1)[1];
  const std::vector<double> expect{1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12};
  for (int i = 0; i < 5; ++i) CHECK(w5[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("weights are exact on polynomials on irregular nodes") {
  const std::vector<double> x{0.0, 0.13, 0.4, 0.41, 0.9, 1.3};
  const double z = 0.55;
  const auto w = fd_weights(z, x, 3);
  for (int deg = 0; deg < 6; ++deg) {
    double d0 = 0, d1 = 0, d2 = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      d0 += w[0][j] * std::pow(x[j], deg);
      d1 += w[1][j] * std::pow(x[j], deg);
      d2 += w[2][j] * std::pow(x[j], deg);
    }
    CHECK(d0 == doctest::Approx(std::pow(z, deg)).epsilon(1e-10));
    CHECK(d1 == doctest::Approx(deg * std::pow(z, deg - 1)).epsilon(1e-9));
    CHECK(d2 == doctest::Approx(deg * (deg - 1) * std::pow(z, std::max(deg - 2, 0))).epsilon(1e-8));
  }
}

TEST_CASE("node derivatives with reflection at the poles") {
  const int m = 200;
  std::vector<double> grid(m + 1), f(m + 1);
  for (int i = 0; i <= m; ++i) {
    grid[i] = std::numbers::pi * i / m;
    f[i] = std::cos(3 * grid[i]);  // even about both 0 and π
  }
  const auto d1 = node_derivative(grid, f, 1, 1);
  const auto d2 = node_derivative(grid, f, 2, 1);
  for (int i = 0; i <= m; ++i) {
    CHECK(std::abs(d1[i] + 3 * std::sin(3 * grid[i])) < 1e-9);
    CHECK(std::abs(d2[i] + 9 * std::cos(3 * grid[i])) < 1e-7);
  }
  std::vector<double> g(m + 1);
  for (int i = 0; i <= m; ++i) g[i] = std::sin(2 * grid[i]);  // odd about 0 and π
  const auto g1 = node_derivative(grid, g, 1, -1);
  for (int i = 0; i <= m; ++i) CHECK(std::abs(g1[i] - 2 * std::cos(2 * grid[i])) < 1e-9);
}

TEST_CASE("quintic Hermite profile") {
  const int m = 64;
  std::vector<double> grid(m + 1), v(m + 1);
  for (int i = 0; i <= m; ++i) {
    grid[i] = std::numbers::pi * i / m;
    v[i] = std::cos(grid[i]) + 0.3 * std::cos(2 * grid[i]);
  }
  const auto prof = Profile::from_values(grid, v);
  CHECK(prof.front() == 0.0);
  CHECK(prof.back() == doctest::Approx(std::numbers::pi));
  for (int i = 0; i <= m; ++i) CHECK(prof.value(grid[i]) == doctest::Approx(v[i]).epsilon(1e-14));
  double e0 = 0, e1 = 0, e2 = 0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = std::numbers::pi * i / 1000;
    e0 = std::max(e0, std::abs(prof.value(r) - (std::cos(r) + 0.3 * std::cos(2 * r))));
    e1 = std::max(e1, std::abs(prof.d1(r) + std::sin(r) + 0.6 * std::sin(2 * r)));
    e2 = std::max(e2, std::abs(prof.d2(r) + std::cos(r) + 1.2 * std::cos(2 * r)));
  }
  CHECK(e0 < 1e-9);
  CHECK(e1 < 1e-7);
  CHECK(e2 < 1e-5);
}

TEST_CASE("profile from a trajectory uses the stored slope") {
  Trajectory t;
  const int m = 32;
  for (int i = 0; i <= m; ++i) {
    const double r = 0.5 * std::numbers::pi * i / m;
    t.grid.push_back(r);
    t.w.push_back(std::cos(r));
    t.wp.push_back(-std::sin(r));
  }
  const auto prof = Profile::from_trajectory(t);
  for (double r : {0.1, 0.77, 1.5}) {
    CHECK(prof.value(r) == doctest::Approx(std::cos(r)).epsilon(1e-9));
    CHECK(prof.d1(r) == doctest::Approx(-std::sin(r)).epsilon(1e-8));
  }
}
