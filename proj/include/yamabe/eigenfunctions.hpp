// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "yamabe/shooter.hpp"

namespace yamabe {

using Rational = boost::multiprecision::cpp_rational;

/// k(n + k - 1), the k-th eigenvalue of the invariant Laplacian problem.
long long beta(int n, int k);

/// Invariant eigenfunction w(r) = Σ_j c_j cos^j(r) of the radial operator
/// with β = β_k, normalized by w(0) = 1. Coefficients are indexed by power
/// (dense, size k + 1); powers with the wrong parity are zero.
struct EigenPoly {
  int n = 2;
  int k = 1;
  std::vector<double> coeffs;
  std::vector<Rational> exact;

  double at_x(double x) const;
  double derivative_at_x(double x) const;
  double operator()(double r) const;
  double derivative(double r) const;  // d/dr
};

/// H_β applied to Σ c_j cos^j(r), using
/// H_β(cos^j) = (β - β_j) cos^j + j(j-1) cos^{j-2}. Works for double and
/// Rational coefficients.
template <class Scalar>
std::vector<Scalar> apply_H(int n, const Scalar& beta_value, const std::vector<Scalar>& coeffs) {
  std::vector<Scalar> out(coeffs.size(), Scalar(0));
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] == Scalar(0)) continue;
    const long long jj = static_cast<long long>(j);
    out[j] += (beta_value - Scalar(beta(n, static_cast<int>(j)))) * coeffs[j];
    if (j >= 2) out[j - 2] += Scalar(jj * (jj - 1)) * coeffs[j];
  }
  return out;
}

/// Built exactly by c_j = -(j+2)(j+1) c_{j+2} / (β_k - β_j), c_k = 1, then
/// scaled so that Σ c_j = 1.
EigenPoly eigenpoly(int n, int k);

struct RootReport {
  int count = 0;
  std::vector<double> roots;        // ascending r in (0, π)
  std::vector<double> slopes;       // w'(r) at each root
  bool all_simple = true;           // every |w'| ≥ 1e-8
};

/// Roots of p_k(cos r) on (0, π), isolated by a Sturm sequence on (-1, 1)
/// and polished by bracketing.
RootReport zero_count(const EigenPoly& poly);

struct InterlaceReport {
  bool holds = true;
  int gaps_checked = 0;
  int first_failing_gap = -1;
};

/// Checks that every gap between consecutive zeros of w_{β_m} contains a zero
/// of w_{β_l}. Requires 1 ≤ m < l.
InterlaceReport sturm_interlace(int n, int m, int l);

struct ParityReport {
  Symmetry symmetry = Symmetry::Even;  // even ⇔ symmetric about π/2
  double w_pi = 0;
};

ParityReport endpoint_parity(const EigenPoly& poly);

} // namespace yamabe
