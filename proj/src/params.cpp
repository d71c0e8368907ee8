// SPDX-License-Identifier: Apache-2.0

#include "yamabe/params.hpp"

#include <cmath>
#include <sstream>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidParameter, what);
}

} // namespace

double critical_exponent(int n) {
  require(n >= 2, "n must be at least 2");
  return static_cast<double>(4 * n) / static_cast<double>(2 * n - 2);
}

void validate(const ProblemParams& params) {
  require(params.n >= 2, "n must be at least 2");
  require(std::isfinite(params.delta) && params.delta > 0, "delta must be positive");
  require(std::isfinite(params.lambda) && params.lambda > 0, "lambda must be positive");
  const double p2n = critical_exponent(params.n);
  if (!(std::isfinite(params.p) && params.p > 2.0 && params.p <= p2n)) {
    std::ostringstream os;
    os << "p must lie in (2, " << p2n << "], got " << params.p;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
}

DerivedConstants derive_constants(const ProblemParams& params) {
  validate(params);
  const int n = params.n;
  DerivedConstants c;
  c.mu = params.lambda / metric_factor(params.delta);
  c.a2n = static_cast<double>(4 * (2 * n - 1)) / static_cast<double>(2 * n - 2);
  c.p2n = critical_exponent(n);
  c.scal = static_cast<double>(n * (n - 1)) * metric_factor(params.delta);
  c.alpha_threshold = std::pow(params.p / 2.0, 1.0 / (params.p - 2.0));
  return c;
}

YamabeParameters yamabe_parameters(int n, double delta) {
  require(n >= 2, "n must be at least 2");
  require(std::isfinite(delta) && delta > 0, "delta must be positive");
  const long long num = static_cast<long long>(n) * (n - 1) * (2 * n - 2);
  const long long den = 4LL * (2 * n - 1);
  return {static_cast<double>(num) / static_cast<double>(den) * metric_factor(delta),
          critical_exponent(n)};
}

ProblemParams yamabe_problem(int n, double delta) {
  const auto y = yamabe_parameters(n, delta);
  return {n, delta, y.p, y.lambda};
}

double bifurcation_lambda(int n, int k, double delta, double p) {
  require(n >= 2, "n must be at least 2");
  require(k >= 1, "k must be at least 1");
  require(std::isfinite(delta) && delta > 0, "delta must be positive");
  require(std::isfinite(p) && p > 2.0, "p must exceed 2");
  const long long beta = static_cast<long long>(k) * (k + n - 1);
  return static_cast<double>(beta) / (p - 2.0) * metric_factor(delta);
}

} // namespace yamabe
