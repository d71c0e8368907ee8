// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "yamabe/error.hpp"
#include "yamabe/params.hpp"

using namespace yamabe;

TEST_CASE("derived constants for the Yamabe case n = 2, delta = 1") {
  const auto c = derive_constants({2, 1.0, 4.0, 2.0 / 3.0});
  CHECK(c.mu == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c.a2n == 6.0);
  CHECK(c.p2n == 4.0);
  CHECK(c.scal == 4.0);
  CHECK(c.alpha_threshold == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("derived constants in other regimes") {
  const auto a = derive_constants({3, 1.0, 3.0, 2.0});
  CHECK(a.mu == 1.0);
  CHECK(a.p2n == 3.0);
  const auto b = derive_constants({2, 0.5, 3.0, 6.0});
  CHECK(b.mu == doctest::Approx(2.0).epsilon(1e-15));
  for (const ProblemParams p : {ProblemParams{2, 1.0, 4.0, 2.0 / 3.0}, ProblemParams{4, 0.3, 2.5, 7.0},
                                ProblemParams{6, 13.0, 2.1, 0.01}}) {
    const auto c = derive_constants(p);
    CHECK(c.mu * metric_factor(p.delta) == doctest::Approx(p.lambda).epsilon(1e-15));
    CHECK(c.mu > 0);
    CHECK(c.p2n > 2);
    CHECK(c.alpha_threshold > 1);
  }
}

TEST_CASE("Yamabe parameters") {
  const auto y2 = yamabe_parameters(2, 1.0);
  CHECK(std::abs(y2.lambda - 2.0 / 3.0) <= 1e-15);
  CHECK(y2.p == 4.0);
  const auto y3 = yamabe_parameters(3, 1.0);
  CHECK(std::abs(y3.lambda - 12.0 / 5.0) <= 1e-15);
  CHECK(y3.p == 3.0);
  for (int n = 2; n <= 8; ++n)
    for (double delta : {0.25, 1.0, 3.0}) {
      const auto y = yamabe_parameters(n, delta);
      const auto c = derive_constants({n, delta, y.p, y.lambda});
      CHECK(y.lambda * c.a2n == doctest::Approx(c.scal).epsilon(1e-14));
    }
}

TEST_CASE("bifurcation values") {
  CHECK(bifurcation_lambda(2, 1, 1.0, 3.0) == 4.0);
  CHECK(bifurcation_lambda(2, 2, 1.0, 3.0) == 12.0);
  CHECK(bifurcation_lambda(2, 3, 1.0, 3.0) == 24.0);
  CHECK(bifurcation_lambda(2, 1, 1000.0, 3.0) == doctest::Approx(2.002).epsilon(1e-15));
  for (int n = 2; n <= 6; ++n)
    for (double p : {2.2, 2.5, 3.0})
      for (double delta : {0.5, 1.0, 2.0})
        for (int k = 1; k <= 15; ++k) {
          const double lk = bifurcation_lambda(n, k, delta, p);
          CHECK(lk < bifurcation_lambda(n, k + 1, delta, p));
          const double recovered = lk * (p - 2.0) / metric_factor(delta);
          CHECK(std::llround(recovered) == static_cast<long long>(k) * (k + n - 1));
        }
}

TEST_CASE("invalid parameters are rejected") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::MalformedInput;
  };
  CHECK(kind_of([] { validate({1, 1.0, 3.0, 1.0}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { validate({2, 0.0, 3.0, 1.0}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { validate({2, 1.0, 2.0, 1.0}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { validate({2, 1.0, 4.0001, 1.0}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { validate({2, 1.0, 3.0, -1.0}); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { bifurcation_lambda(2, 0, 1.0, 3.0); }) == ErrorKind::InvalidParameter);
  CHECK_NOTHROW(validate({2, 1.0, 4.0, 1.0}));
}
