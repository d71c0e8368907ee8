// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace yamabe {

/// Problem data for -Δu + λu = λ|u|^{p-2}u on S^n × S^n with the product
/// metric g + δ·g (both factors round unit spheres).
struct ProblemParams {
  int n = 2;
  double delta = 1.0;
  double p = 4.0;
  double lambda = 2.0 / 3.0;
};

struct DerivedConstants {
  double mu = 0;              // λ / (1 + 1/δ), the coefficient in the radial ODE
  double a2n = 0;             // conformal Laplacian constant in dimension 2n
  double p2n = 0;             // critical exponent in dimension 2n
  double scal = 0;            // scalar curvature of the product metric
  double alpha_threshold = 0; // (p/2)^{1/(p-2)}: below it shots keep positive on (0, π/2)
};

struct YamabeParameters {
  double lambda = 0;
  double p = 0;
};

/// 4n / (2n - 2).
double critical_exponent(int n);

/// Throws Error(InvalidParameter) unless n ≥ 2, δ > 0, λ > 0, 2 < p ≤ p_{2n}.
void validate(const ProblemParams& params);

DerivedConstants derive_constants(const ProblemParams& params);

/// λ and p for which the equation is the Yamabe equation of the product.
YamabeParameters yamabe_parameters(int n, double delta);

/// Convenience: the Yamabe-case ProblemParams for (n, δ).
ProblemParams yamabe_problem(int n, double delta);

/// k(k+n-1)/(p-2) · (1 + 1/δ): the λ at which the k-th invariant eigenmode
/// enters the kernel of the linearization around u ≡ 1.
double bifurcation_lambda(int n, int k, double delta, double p);

/// 1 + 1/δ, the factor relating λ and μ.
inline double metric_factor(double delta) { return 1.0 + 1.0 / delta; }

} // namespace yamabe
