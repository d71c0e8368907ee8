// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "yamabe/bifurcation.hpp"
#include "yamabe/nodal_search.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/shooter.hpp"

namespace yamabe {

struct ResidualReport {
  double sup_residual = 0;
  double mean_residual = 0;
  std::string sample;
  std::size_t samples = 0;
  /// Set only when the check was repeated with the step halved.
  std::optional<double> sup_residual_half;
  std::optional<double> slope;
  // Components of sup_residual where the check has more than one.
  double equation_sup = 0;
  double consistency_sup = 0;
};

/// Residual of w'' + (n-1)cot(r)w' + μ g(w) on the trajectory nodes with w''
/// reconstructed from the stored w' (n w'' + μ g(w) at r = 0, π), together
/// with the mismatch between the stored w' and the derivative of w.
ResidualReport ode_residual(const Trajectory& t);

/// A function of t ∈ [-1, 1] with its first two derivatives.
struct PhiFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// φ(t) = w(arccos t) with derivatives by the chain rule.
PhiFunction phi_from_profile(Profile profile);

/// Residual of -(1-t²)φ'' + ntφ' + μφ - μ|φ|^{p-2}φ at Chebyshev points
/// with |t| ≤ t_max.
ResidualReport t_equation_residual(const PhiFunction& phi, const ProblemParams& params,
                                   int samples = 401, double t_max = 0.999);

struct ProductPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

ProductPoint random_product_point(int n, std::mt19937_64& rng);

/// Orthonormal basis of the tangent space of S^n at x.
std::vector<Eigen::VectorXd> tangent_frame(const Eigen::VectorXd& x);

using ScalarFunction = std::function<double(double)>;

/// Δ(φ∘f) at (x, y) for f = ⟨x, y⟩ and the metric g + δg, by central second
/// differences along unit-speed great circles of both factors.
double product_laplacian_fd(const ScalarFunction& phi, const ProductPoint& point,
                            const ProblemParams& params, double h);

/// |∇(φ∘f)|² at (x, y) by central first differences along the same circles.
double product_gradient_sq_fd(const ScalarFunction& phi, const ProductPoint& point,
                              const ProblemParams& params, double h);

struct IdentityReport {
  double laplacian_sup = 0, laplacian_sup_half = 0, laplacian_slope = 0;
  double gradient_sup = 0, gradient_sup_half = 0, gradient_slope = 0;
  int points = 0;
};

/// Compares the finite-difference Laplacian and gradient of f = ⟨x, y⟩ with
/// -n(1+1/δ)f and (1+1/δ)(1-f²) at random points, at steps h and h/2.
IdentityReport check_product_identities(const ProblemParams& params, int points, double h,
                                        std::uint64_t seed = 20240607);

/// Residual of -Δu + λu - λ|u|^{p-2}u for u = φ∘f at m random points, at h
/// and h/2, with the observed order.
ResidualReport pde_residual_sampled(const ScalarFunction& phi, const ProblemParams& params, int m,
                                    double h, std::uint64_t seed = 20240607);
ResidualReport pde_residual_sampled(const NodalSolution& solution, const ProblemParams& params,
                                    int m, double h, std::uint64_t seed = 20240607);
ResidualReport pde_residual_sampled(const DiscreteSolution& solution, const BvpGrid& grid, int m,
                                    double h, std::uint64_t seed = 20240607);

/// Re-derives a discrete solution by two-sided shooting started from its
/// endpoint values and checks the shooting solution against the radial
/// equation.
struct DiscreteVerification {
  double discrete_residual = 0;
  double distance_to_shooting = 0;  // sup over grid nodes
  ResidualReport shooting_residual;
  Trajectory shooting;
  bool passed = false;
};

DiscreteVerification verify_discrete(const DiscreteSolution& solution, const BvpGrid& grid,
                                     const IntegratorConfig& config = {}, double ode_tol = 1e-6,
                                     double distance_tol = 1e-2);

/// Sup-distance between a grid profile and a trajectory sampled at the grid.
double distance_to_trajectory(const Eigen::VectorXd& u, const BvpGrid& grid, const Trajectory& t);

} // namespace yamabe
