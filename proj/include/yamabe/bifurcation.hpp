// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "yamabe/params.hpp"

namespace yamabe {

/// Uniform nodes r_i = iπ/N, i = 0 … N, carrying the fixed problem data.
struct BvpGrid {
  int N = 400;
  int n = 2;
  double delta = 1.0;
  double p = 3.0;

  double h() const;
  double node(int i) const;
  std::vector<double> nodes() const;
  int size() const { return N + 1; }
};

/// Throws Error(InvalidParameter) unless N ≥ 50, n ≥ 2, δ > 0, p > 2.
BvpGrid make_grid(int N, int n, double delta, double p);

struct DiscreteSolution {
  Eigen::VectorXd u;
  double lambda = 0;
  double residual_norm = 0;  // see residual_norm()
  bool positive = false;     // min(u) > 0
  bool trivial = false;      // sup|u - 1| ≤ 1e-8
  int iterations = 0;
  std::vector<double> history;  // residual norm per Newton iteration
};

/// Max-norm of a discrete residual with each row divided by the magnitude of
/// its second-difference diagonal (2/h², or 2n/h² at the endpoints), so the
/// round-off floor does not grow with N.
double residual_norm(const BvpGrid& grid, const Eigen::VectorXd& F);

/// Second-order central differences of u'' + (n-1)cot(r)u' + μ g(u) with
/// n u'' + μ g(u) = 0 at r = 0, π (ghost node, u' = 0).
Eigen::VectorXd bvp_residual(const BvpGrid& grid, const Eigen::VectorXd& u, double lambda);
Eigen::SparseMatrix<double> bvp_jacobian(const BvpGrid& grid, const Eigen::VectorXd& u,
                                         double lambda);
/// ∂F/∂λ.
Eigen::VectorXd bvp_lambda_derivative(const BvpGrid& grid, const Eigen::VectorXd& u);

/// Discrete eigenvalues θ_j ≈ β_j of -(d²/dr² + (n-1)cot(r) d/dr) with the
/// same closure, ascending.
std::vector<double> radial_laplacian_spectrum(const BvpGrid& grid, int count);

struct LinearizationSpectrum {
  double lambda = 0;
  /// Eigenvalues θ_j - μ(p-2) of the linearization at u ≡ 1 (sign
  /// convention of -Δ - λ(p-2)), ascending. Index 0 is the constant mode,
  /// which is negative for every λ > 0.
  std::vector<double> eigenvalues;
  /// Number of non-constant modes that have crossed zero, i.e. the number
  /// of bifurcation values below λ.
  int crossings = 0;
  double smallest_nonconstant = 0;
};

LinearizationSpectrum trivial_linearization_spectrum(const BvpGrid& grid, double lambda,
                                                     int count = 8);

/// λ at which the k-th non-constant eigenvalue crosses zero on this grid.
double discrete_bifurcation_lambda(const BvpGrid& grid, int k);

/// Null vector of the linearization at (1, discrete λ_k), scaled so v(0) = 1.
Eigen::VectorXd discrete_kernel_vector(const BvpGrid& grid, int k);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 40;
};

/// Damped Newton for the discrete problem at fixed λ. Throws
/// Error(NoConvergence) when the budget runs out or iterates blow up.
DiscreteSolution newton_solve(const BvpGrid& grid, const Eigen::VectorXd& initial, double lambda,
                              const NewtonOptions& options = {});

struct ContinuationConfig {
  double seed_t = 1e-2;
  double ds_initial = 0.02;
  double ds_min = 1e-6;
  double ds_max = 0.1;
  double lambda_ceiling = 0;  // 0: 3 λ_k
  double lambda_floor = 0;    // 0: λ_k / 100
  int max_points = 2000;
  int max_corrector_iterations = 10;
  double newton_tol = 1e-10;
};

struct BranchPoint {
  double lambda = 0;
  DiscreteSolution solution;
  double amplitude = 0;  // sup|u - 1|
  int sign_changes = 0;  // interior sign changes of u - 1
  double t = 0;          // coordinate of u - 1 along w_{β_k}
};

struct Branch {
  int k = 0;
  int direction = 1;
  std::vector<BranchPoint> points;
  std::string termination;
};

/// Samples 1 + t·w_{β_k} on the grid.
Eigen::VectorXd seed_profile(const BvpGrid& grid, int k, double t);

/// The nontrivial solution on the local curve through (1, λ_k) whose
/// component along w_{β_k} equals t.
BranchPoint local_branch_point(const BvpGrid& grid, int k, double t,
                               const NewtonOptions& options = {});

/// Pseudo-arclength continuation from (1 + direction·t₀·w_{β_k}, λ_k).
/// Throws Error(SeedFailure) if the first corrector fails.
Branch branch_from(int k, const BvpGrid& grid, const ContinuationConfig& config, int direction = 1);

/// Both sides of the local curve.
std::vector<Branch> branches_from(int k, const BvpGrid& grid, const ContinuationConfig& config);

struct FoundSolution {
  int k = 0;
  int direction = 1;
  DiscreteSolution solution;
  int sign_changes = 0;
};

struct SolutionsReport {
  double lambda = 0;
  std::vector<FoundSolution> solutions;  // distinct, positive, nontrivial
  std::vector<std::string> errors;       // per-branch failures
  std::vector<Branch> branches;
};

/// Traces every branch with λ_k < λ (k ≤ k_max), corrects each crossing of
/// λ by Newton, and keeps the positive nontrivial profiles that differ by
/// more than dedup_tol in sup-norm.
SolutionsReport solutions_at(double lambda, const BvpGrid& grid, int k_max,
                             const ContinuationConfig& config = {}, double dedup_tol = 1e-3);

/// Sup-norm distance between two grid profiles.
double sup_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

int interior_sign_changes_minus_one(const Eigen::VectorXd& u);

} // namespace yamabe
