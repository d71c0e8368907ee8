// SPDX-License-Identifier: Apache-2.0

#include "yamabe/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "yamabe/eigenfunctions.hpp"
#include "yamabe/error.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/shooter.hpp"

namespace yamabe {

namespace {

using Triplet = Eigen::Triplet<double>;
using SparseMatrix = Eigen::SparseMatrix<double>;

double mu_of(const BvpGrid& grid, double lambda) { return lambda / metric_factor(grid.delta); }

double g_prime(double u, double p) {
  const double a = std::abs(u);
  return (p - 1.0) * (a > 0 ? std::exp((p - 2.0) * std::log(a)) : 0.0) - 1.0;
}

/// Triplets of the discrete operator u ↦ u'' + (n-1)cot(r)u' (endpoint rows
/// use n·u'' with a ghost node).
void laplacian_triplets(const BvpGrid& grid, std::vector<Triplet>& out) {
  const int N = grid.N, n = grid.n;
  const double h = grid.h(), h2 = h * h;
  out.emplace_back(0, 0, -2.0 * n / h2);
  out.emplace_back(0, 1, 2.0 * n / h2);
  for (int i = 1; i < N; ++i) {
    const double r = grid.node(i);
    const double drift = (n - 1) * std::cos(r) / std::sin(r) / (2.0 * h);
    out.emplace_back(i, i - 1, 1.0 / h2 - drift);
    out.emplace_back(i, i, -2.0 / h2);
    out.emplace_back(i, i + 1, 1.0 / h2 + drift);
  }
  out.emplace_back(N, N - 1, 2.0 * n / h2);
  out.emplace_back(N, N, -2.0 * n / h2);
}

SparseMatrix laplacian_matrix(const BvpGrid& grid) {
  std::vector<Triplet> t;
  laplacian_triplets(grid, t);
  SparseMatrix m(grid.size(), grid.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

void classify(DiscreteSolution& s) {
  s.positive = s.u.minCoeff() > 0;
  s.trivial = sup_norm(s.u.array() - 1.0) <= 1e-8;
}

/// Inner product weighting used for arclength: mean square on u, λ scaled by
/// the bifurcation value.
struct ArcMetric {
  double wu, wl;
  double dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const Eigen::Index m = a.size() - 1;
    return wu * a.head(m).dot(b.head(m)) + wl * a[m] * b[m];
  }
  double norm(const Eigen::VectorXd& a) const { return std::sqrt(dot(a, a)); }
};

/// Solves F(u, λ) = 0 together with the linear constraint c·X = target by
/// Newton on the bordered system. X = (u, λ).
bool bordered_newton(const BvpGrid& grid, Eigen::VectorXd& X, const Eigen::VectorXd& c,
                     double target, double tol, int max_iterations, int& iterations,
                     std::vector<double>* history = nullptr) {
  const int m = grid.size();
  std::vector<Triplet> base;
  laplacian_triplets(grid, base);
  iterations = 0;
  for (int it = 0; it <= max_iterations; ++it) {
    const Eigen::VectorXd u = X.head(m);
    const double lambda = X[m];
    const Eigen::VectorXd F = bvp_residual(grid, u, lambda);
    const double cres = c.dot(X) - target;
    const double fn = residual_norm(grid, F);
    if (history) history->push_back(fn);
    if (!std::isfinite(fn) || !std::isfinite(cres)) return false;
    if (fn <= tol && std::abs(cres) <= tol) return true;
    if (it == max_iterations) break;

    std::vector<Triplet> t = base;
    const double mu = mu_of(grid, lambda);
    for (int i = 0; i < m; ++i) t.emplace_back(i, i, mu * g_prime(u[i], grid.p));
    const Eigen::VectorXd Fl = bvp_lambda_derivative(grid, u);
    for (int i = 0; i < m; ++i) {
      t.emplace_back(i, m, Fl[i]);
      if (c[i] != 0.0) t.emplace_back(m, i, c[i]);
    }
    t.emplace_back(m, m, c[m]);
    SparseMatrix A(m + 1, m + 1);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = -F;
    rhs[m] = -cres;
    const Eigen::VectorXd dX = lu.solve(rhs);
    if (!dX.allFinite()) return false;
    X += dX;
    ++iterations;
  }
  return false;
}

} // namespace

double BvpGrid::h() const { return std::numbers::pi / N; }

double BvpGrid::node(int i) const { return i == N ? std::numbers::pi : i * h(); }

std::vector<double> BvpGrid::nodes() const {
  std::vector<double> r(size());
  for (int i = 0; i <= N; ++i) r[i] = node(i);
  return r;
}

BvpGrid make_grid(int N, int n, double delta, double p) {
  if (N < 50) throw Error(ErrorKind::InvalidParameter, "grid needs N >= 50");
  if (n < 2) throw Error(ErrorKind::InvalidParameter, "n must be at least 2");
  if (!(delta > 0)) throw Error(ErrorKind::InvalidParameter, "delta must be positive");
  if (!(p > 2)) throw Error(ErrorKind::InvalidParameter, "p must exceed 2");
  return {N, n, delta, p};
}

double residual_norm(const BvpGrid& grid, const Eigen::VectorXd& F) {
  const double h2 = grid.h() * grid.h();
  const Eigen::Index N = F.size() - 1;
  double out = 0;
  for (Eigen::Index i = 0; i <= N; ++i) {
    const double diag = (i == 0 || i == N ? 2.0 * grid.n : 2.0) / h2;
    out = std::max(out, std::abs(F[i]) / diag);
  }
  return out;
}

Eigen::VectorXd bvp_residual(const BvpGrid& grid, const Eigen::VectorXd& u, double lambda) {
  const int N = grid.N, n = grid.n;
  const double h = grid.h(), h2 = h * h;
  const double mu = mu_of(grid, lambda);
  Eigen::VectorXd F(grid.size());
  F[0] = 2.0 * n * (u[1] - u[0]) / h2 + mu * nonlinearity(u[0], grid.p);
  for (int i = 1; i < N; ++i) {
    const double r = grid.node(i);
    F[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2 +
           (n - 1) * std::cos(r) / std::sin(r) * (u[i + 1] - u[i - 1]) / (2.0 * h) +
           mu * nonlinearity(u[i], grid.p);
  }
  F[N] = 2.0 * n * (u[N - 1] - u[N]) / h2 + mu * nonlinearity(u[N], grid.p);
  return F;
}

SparseMatrix bvp_jacobian(const BvpGrid& grid, const Eigen::VectorXd& u, double lambda) {
  std::vector<Triplet> t;
  laplacian_triplets(grid, t);
  const double mu = mu_of(grid, lambda);
  for (int i = 0; i < grid.size(); ++i) t.emplace_back(i, i, mu * g_prime(u[i], grid.p));
  SparseMatrix J(grid.size(), grid.size());
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

Eigen::VectorXd bvp_lambda_derivative(const BvpGrid& grid, const Eigen::VectorXd& u) {
  Eigen::VectorXd d(grid.size());
  const double s = 1.0 / metric_factor(grid.delta);
  for (int i = 0; i < grid.size(); ++i) d[i] = s * nonlinearity(u[i], grid.p);
  return d;
}

std::vector<double> radial_laplacian_spectrum(const BvpGrid& grid, int count) {
  const int m = grid.size();
  const Eigen::MatrixXd M = -Eigen::MatrixXd(laplacian_matrix(grid));
  Eigen::VectorXd diag(m), off(m - 1);
  bool symmetrizable = true;
  for (int i = 0; i < m; ++i) diag[i] = M(i, i);
  for (int i = 0; i + 1 < m; ++i) {
    const double prod = M(i, i + 1) * M(i + 1, i);
    if (!(prod > 0)) {
      symmetrizable = false;
      break;
    }
    off[i] = -std::sqrt(prod);
  }
  std::vector<double> values;
  if (symmetrizable) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::EigenSolverFailure, "tridiagonal eigensolver failed");
    values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::EigenSolverFailure, "dense eigensolver failed");
    for (int i = 0; i < m; ++i) values.push_back(solver.eigenvalues()[i].real());
  }
  std::sort(values.begin(), values.end());
  values.resize(std::min<std::size_t>(values.size(), static_cast<std::size_t>(count)));
  return values;
}

LinearizationSpectrum trivial_linearization_spectrum(const BvpGrid& grid, double lambda,
                                                     int count) {
  LinearizationSpectrum s;
  s.lambda = lambda;
  const double shift = mu_of(grid, lambda) * (grid.p - 2.0);
  for (double theta : radial_laplacian_spectrum(grid, std::max(count, 2)))
    s.eigenvalues.push_back(theta - shift);
  for (std::size_t j = 1; j < s.eigenvalues.size(); ++j)
    if (s.eigenvalues[j] < 0) ++s.crossings;
  s.smallest_nonconstant = s.eigenvalues[1];
  return s;
}

double discrete_bifurcation_lambda(const BvpGrid& grid, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be at least 1");
  const auto theta = radial_laplacian_spectrum(grid, k + 1);
  return theta[k] * metric_factor(grid.delta) / (grid.p - 2.0);
}

Eigen::VectorXd discrete_kernel_vector(const BvpGrid& grid, int k) {
  const auto theta = radial_laplacian_spectrum(grid, k + 1);
  const SparseMatrix M = -laplacian_matrix(grid);
  SparseMatrix I(grid.size(), grid.size());
  I.setIdentity();
  const double shift = theta[k] * (1.0 + 1e-9) + 1e-12;
  SparseMatrix A = M - shift * I;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::EigenSolverFailure, "inverse iteration factorization failed");
  Eigen::VectorXd v = seed_profile(grid, k, 1.0).array() - 1.0;
  for (int it = 0; it < 4; ++it) {
    v = lu.solve(v);
    v /= sup_norm(v);
  }
  return v / v[0];
}

DiscreteSolution newton_solve(const BvpGrid& grid, const Eigen::VectorXd& initial, double lambda,
                              const NewtonOptions& options) {
  if (initial.size() != grid.size() || !initial.allFinite())
    throw Error(ErrorKind::InvalidParameter, "initial guess must be finite with N+1 entries");
  DiscreteSolution s;
  s.lambda = lambda;
  s.u = initial;
  Eigen::VectorXd F = bvp_residual(grid, s.u, lambda);
  double fn = residual_norm(grid, F);
  s.history.push_back(fn);
  int it = 0;
  for (; fn > options.tol && it < options.max_iterations; ++it) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(bvp_jacobian(grid, s.u, lambda));
    if (lu.info() != Eigen::Success)
      throw Error(ErrorKind::NoConvergence, "singular Jacobian during Newton");
    const Eigen::VectorXd du = lu.solve(-F);
    if (!du.allFinite()) throw Error(ErrorKind::NoConvergence, "non-finite Newton step");
    double step = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd Ft;
    double tn = 0;
    for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
      trial = s.u + step * du;
      Ft = bvp_residual(grid, trial, lambda);
      tn = residual_norm(grid, Ft);
      if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * step) * fn) break;
    }
    if (!std::isfinite(tn)) throw Error(ErrorKind::NoConvergence, "Newton iterate blew up");
    s.u = trial;
    F = Ft;
    fn = tn;
    s.history.push_back(fn);
  }
  // The scaled norm is loose on the reaction term; take full steps until
  // the update itself is at round-off level.
  for (int polish = 0; fn <= options.tol && polish < 3; ++polish) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(bvp_jacobian(grid, s.u, lambda));
    if (lu.info() != Eigen::Success) break;
    const Eigen::VectorXd du = lu.solve(-F);
    if (!du.allFinite()) break;
    const Eigen::VectorXd trial = s.u + du;
    const Eigen::VectorXd Ft = bvp_residual(grid, trial, lambda);
    const double tn = residual_norm(grid, Ft);
    if (!(tn <= fn)) break;
    s.u = trial;
    F = Ft;
    fn = tn;
    s.history.push_back(fn);
    ++it;
    if (sup_norm(du) <= 1e-14 * (1.0 + sup_norm(s.u))) break;
  }
  s.iterations = it;
  s.residual_norm = fn;
  if (fn > options.tol) {
    std::ostringstream os;
    os << "Newton stopped after " << it << " iterations with residual " << fn;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  classify(s);
  return s;
}

Eigen::VectorXd seed_profile(const BvpGrid& grid, int k, double t) {
  const auto w = eigenpoly(grid.n, k);
  Eigen::VectorXd u(grid.size());
  for (int i = 0; i < grid.size(); ++i) u[i] = 1.0 + t * w(grid.node(i));
  return u;
}

int interior_sign_changes_minus_one(const Eigen::VectorXd& u) {
  std::vector<double> v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) v[i] = u[i] - 1.0;
  return count_sign_changes(v);
}

double sup_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return sup_norm(a - b); }

namespace {

BranchPoint make_point(const BvpGrid& grid, const Eigen::VectorXd& X, const Eigen::VectorXd& w,
                       int iterations, std::vector<double> history) {
  const int m = grid.size();
  BranchPoint pt;
  pt.lambda = X[m];
  pt.solution.u = X.head(m);
  pt.solution.lambda = X[m];
  pt.solution.residual_norm = residual_norm(grid, bvp_residual(grid, pt.solution.u, pt.lambda));
  pt.solution.iterations = iterations;
  pt.solution.history = std::move(history);
  classify(pt.solution);
  const Eigen::VectorXd v = pt.solution.u.array() - 1.0;
  pt.amplitude = sup_norm(v);
  pt.sign_changes = interior_sign_changes_minus_one(pt.solution.u);
  pt.t = v.dot(w) / w.dot(w);
  return pt;
}

} // namespace

BranchPoint local_branch_point(const BvpGrid& grid, int k, double t, const NewtonOptions& options) {
  const int m = grid.size();
  const Eigen::VectorXd w = seed_profile(grid, k, 1.0).array() - 1.0;
  Eigen::VectorXd X(m + 1);
  X.head(m) = seed_profile(grid, k, t);
  X[m] = bifurcation_lambda(grid.n, k, grid.delta, grid.p);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m + 1);
  c.head(m) = w;
  // c·X = Σ w_i u_i = Σ w_i + t Σ w_i².
  const double target = w.sum() + t * w.dot(w);
  int iterations = 0;
  std::vector<double> history;
  if (!bordered_newton(grid, X, c, target, options.tol, options.max_iterations, iterations,
                       &history)) {
    std::ostringstream os;
    os << "corrector at t = " << t << " on branch " << k << " did not converge";
    throw Error(ErrorKind::SeedFailure, os.str());
  }
  return make_point(grid, X, w, iterations, std::move(history));
}

Branch branch_from(int k, const BvpGrid& grid, const ContinuationConfig& config, int direction) {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be at least 1");
  const int m = grid.size();
  const double lambda_k = bifurcation_lambda(grid.n, k, grid.delta, grid.p);
  const double ceiling = config.lambda_ceiling > 0 ? config.lambda_ceiling : 3.0 * lambda_k;
  const double floor = config.lambda_floor > 0 ? config.lambda_floor : lambda_k / 100.0;
  const ArcMetric metric{1.0 / m, 1.0 / (lambda_k * lambda_k)};
  const Eigen::VectorXd w = seed_profile(grid, k, 1.0).array() - 1.0;

  Branch branch;
  branch.k = k;
  branch.direction = direction >= 0 ? 1 : -1;
  NewtonOptions seed_options;
  seed_options.tol = config.newton_tol;
  seed_options.max_iterations = 2 * config.max_corrector_iterations;
  branch.points.push_back(local_branch_point(grid, k, branch.direction * config.seed_t, seed_options));

  Eigen::VectorXd X(m + 1);
  X.head(m) = branch.points.back().solution.u;
  X[m] = branch.points.back().lambda;
  Eigen::VectorXd T = Eigen::VectorXd::Zero(m + 1);
  T.head(m) = branch.direction * w;
  T /= metric.norm(T);

  double ds = config.ds_initial;
  while (static_cast<int>(branch.points.size()) < config.max_points) {
    if (ds < config.ds_min) {
      branch.termination = "step-failure";
      return branch;
    }
    const Eigen::VectorXd Xp = X + ds * T;
    Eigen::VectorXd Xn = Xp;
    Eigen::VectorXd c(m + 1);
    c.head(m) = metric.wu * T.head(m);
    c[m] = metric.wl * T[m];
    int iterations = 0;
    std::vector<double> history;
    const bool ok = bordered_newton(grid, Xn, c, c.dot(Xp), config.newton_tol,
                                    config.max_corrector_iterations, iterations, &history);
    if (!ok) {
      ds *= 0.5;
      continue;
    }
    Eigen::VectorXd secant = Xn - X;
    const double len = metric.norm(secant);
    if (!(len > 0)) {
      ds *= 0.5;
      continue;
    }
    secant /= len;
    // A corrector that swings the direction around has jumped branches.
    if (metric.dot(secant, T) < 0.5) {
      ds *= 0.5;
      continue;
    }
    T = secant;
    X = Xn;
    branch.points.push_back(make_point(grid, X, w, iterations, std::move(history)));
    const auto& pt = branch.points.back();

    if (iterations <= 3) ds = std::min(ds * 1.5, config.ds_max);
    else if (iterations >= 7) ds *= 0.7;

    if (!pt.solution.positive) {
      branch.termination = "positivity-loss";
      return branch;
    }
    if (pt.lambda > ceiling) {
      branch.termination = "lambda-ceiling";
      return branch;
    }
    if (pt.lambda < floor) {
      branch.termination = "lambda-floor";
      return branch;
    }
    if (branch.points.size() > 5 && pt.amplitude < 1e-6) {
      branch.termination = "returned-to-trivial";
      return branch;
    }
  }
  branch.termination = "max-points";
  return branch;
}

std::vector<Branch> branches_from(int k, const BvpGrid& grid, const ContinuationConfig& config) {
  std::vector<Branch> out(2);
  parallel_for(2, [&](std::size_t i) { out[i] = branch_from(k, grid, config, i == 0 ? 1 : -1); });
  return out;
}

SolutionsReport solutions_at(double lambda, const BvpGrid& grid, int k_max,
                             const ContinuationConfig& config, double dedup_tol) {
  SolutionsReport report;
  report.lambda = lambda;
  std::vector<int> ks;
  for (int k = 1; k <= k_max; ++k)
    if (bifurcation_lambda(grid.n, k, grid.delta, grid.p) < lambda) ks.push_back(k);

  ContinuationConfig cfg = config;
  cfg.lambda_ceiling = std::max(config.lambda_ceiling, 1.25 * lambda);

  std::vector<std::vector<Branch>> per_k(ks.size());
  std::vector<std::string> errors(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    for (int dir : {1, -1}) {
      try {
        per_k[i].push_back(branch_from(ks[i], grid, cfg, dir));
      } catch (const Error& e) {
        std::ostringstream os;
        os << "branch " << ks[i] << (dir > 0 ? "+" : "-") << ": " << e.what();
        errors[i] += (errors[i].empty() ? "" : "; ") + os.str();
      }
    }
  });

  NewtonOptions opts;
  opts.tol = config.newton_tol;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!errors[i].empty()) report.errors.push_back(errors[i]);
    for (auto& br : per_k[i]) {
      for (std::size_t j = 0; j + 1 < br.points.size(); ++j) {
        const auto& a = br.points[j];
        const auto& b = br.points[j + 1];
        if ((a.lambda - lambda) * (b.lambda - lambda) > 0) continue;
        if (!a.solution.positive || !b.solution.positive) continue;
        const double s = b.lambda != a.lambda ? (lambda - a.lambda) / (b.lambda - a.lambda) : 0.0;
        const Eigen::VectorXd guess = a.solution.u + s * (b.solution.u - a.solution.u);
        try {
          auto sol = newton_solve(grid, guess, lambda, opts);
          if (!sol.positive || sol.trivial) continue;
          const bool fresh = std::none_of(
              report.solutions.begin(), report.solutions.end(),
              [&](const FoundSolution& f) { return sup_distance(f.solution.u, sol.u) <= dedup_tol; });
          if (fresh) {
            const int changes = interior_sign_changes_minus_one(sol.u);
            report.solutions.push_back({br.k, br.direction, std::move(sol), changes});
          }
        } catch (const Error& e) {
          report.errors.push_back(std::string("crossing on branch ") + std::to_string(br.k) +
                                  ": " + e.what());
        }
      }
      report.branches.push_back(std::move(br));
    }
  }
  return report;
}

} // namespace yamabe
