// SPDX-License-Identifier: Apache-2.0

#include "yamabe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "yamabe/error.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/profile.hpp"

namespace yamabe {

namespace {

Eigen::VectorXd random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

double along(const Eigen::VectorXd& x, const Eigen::VectorXd& e, double s,
             const Eigen::VectorXd& other) {
  return std::cos(s) * x.dot(other) + std::sin(s) * e.dot(other);
}

std::vector<ProductPoint> sample_points(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ProductPoint> pts;
  pts.reserve(m);
  for (int i = 0; i < m; ++i) pts.push_back(random_product_point(n, rng));
  return pts;
}

double pde_point_residual(const ScalarFunction& phi, const ProductPoint& pt,
                          const ProblemParams& params, double h) {
  const double u = phi(pt.x.dot(pt.y));
  const double lap = product_laplacian_fd(phi, pt, params, h);
  const double a = std::abs(u);
  const double power = a > 0 ? std::copysign(std::exp((params.p - 1.0) * std::log(a)), u) : 0.0;
  return -lap + params.lambda * u - params.lambda * power;
}

/// The nonlinearity is only finitely smooth at w = 0, so centered stencils
/// lose order there. Recompute first derivatives at nodes near each sign
/// change from stencils that stay on one side of it.
void one_sided_near_zeros(const Trajectory& t, std::vector<double>& w1, std::vector<double>& w2,
                          int width = 9) {
  const long m = static_cast<long>(t.size());
  auto redo = [&](long i, long first) {
    if (first < 0 || first + width > m) return;
    const std::span<const double> nodes(t.grid.data() + first, width);
    const auto wt = fd_weights(t.grid[i], nodes, 1)[1];
    double d1 = 0, d2 = 0;
    for (int j = 0; j < width; ++j) {
      d1 += wt[j] * (t.w[first + j] - t.w[i]);
      d2 += wt[j] * (t.wp[first + j] - t.wp[i]);
    }
    w1[i] = d1;
    w2[i] = d2;
  };
  for (long j = 0; j + 1 < m; ++j) {
    const bool cross = (t.w[j] > 0 && t.w[j + 1] < 0) || (t.w[j] < 0 && t.w[j + 1] > 0);
    const bool at_node = t.w[j] == 0.0 && j > 0;
    if (!cross && !at_node) continue;
    for (long i = std::max(0L, j - width + 2); i <= j; ++i) redo(i, j - width + 1);
    const long right = at_node ? j : j + 1;
    for (long i = j + 1; i < std::min(m, right + width - 1); ++i) redo(i, right);
  }
}

} // namespace

ResidualReport ode_residual(const Trajectory& t) {
  const auto consts = derive_constants(t.params);
  const int n = t.params.n;
  const double mu = consts.mu;
  auto w2 = node_derivative(t.grid, t.wp, 1, -1);
  auto w1 = node_derivative(t.grid, t.w, 1, 1);
  one_sided_near_zeros(t, w1, w2);

  ResidualReport rep;
  rep.sample = "trajectory nodes";
  rep.samples = t.size();
  double total = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = t.grid[i];
    const double g = mu * nonlinearity(t.w[i], t.params.p);
    const bool endpoint = r == 0.0 || std::abs(r - std::numbers::pi) < 1e-14;
    const double res =
        endpoint ? n * w2[i] + g : w2[i] + (n - 1) * std::cos(r) / std::sin(r) * t.wp[i] + g;
    rep.equation_sup = std::max(rep.equation_sup, std::abs(res));
    rep.consistency_sup = std::max(rep.consistency_sup, std::abs(w1[i] - t.wp[i]));
    total += std::abs(res);
  }
  rep.mean_residual = t.size() ? total / t.size() : 0.0;
  rep.sup_residual = std::max(rep.equation_sup, rep.consistency_sup);
  return rep;
}

PhiFunction phi_from_profile(Profile profile) {
  auto shared = std::make_shared<const Profile>(std::move(profile));
  PhiFunction phi;
  phi.value = [shared](double t) { return shared->value(std::acos(std::clamp(t, -1.0, 1.0))); };
  phi.d1 = [shared](double t) {
    const double r = std::acos(std::clamp(t, -1.0, 1.0));
    return -shared->d1(r) / std::sin(r);
  };
  phi.d2 = [shared](double t) {
    const double r = std::acos(std::clamp(t, -1.0, 1.0));
    const double s = std::sin(r);
    return (shared->d2(r) - shared->d1(r) * t / s) / (s * s);
  };
  return phi;
}

ResidualReport t_equation_residual(const PhiFunction& phi, const ProblemParams& params,
                                   int samples, double t_max) {
  const double mu = derive_constants(params).mu;
  const int n = params.n;
  ResidualReport rep;
  std::ostringstream os;
  os << "Chebyshev points, |t| <= " << t_max;
  rep.sample = os.str();
  double total = 0;
  for (int j = 0; j < samples; ++j) {
    const double t = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * samples));
    if (std::abs(t) > t_max) continue;
    const double f = phi.value(t);
    const double res = -(1.0 - t * t) * phi.d2(t) + n * t * phi.d1(t) + mu * f -
                       mu * (nonlinearity(f, params.p) + f);
    rep.sup_residual = std::max(rep.sup_residual, std::abs(res));
    total += std::abs(res);
    ++rep.samples;
  }
  rep.equation_sup = rep.sup_residual;
  rep.mean_residual = rep.samples ? total / rep.samples : 0.0;
  return rep;
}

ProductPoint random_product_point(int n, std::mt19937_64& rng) {
  return {random_unit(n + 1, rng), random_unit(n + 1, rng)};
}

std::vector<Eigen::VectorXd> tangent_frame(const Eigen::VectorXd& x) {
  const int dim = static_cast<int>(x.size());
  std::vector<Eigen::VectorXd> frame;
  for (int j = 0; j < dim && static_cast<int>(frame.size()) < dim - 1; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, j);
    v -= v.dot(x) * x;
    for (const auto& e : frame) v -= v.dot(e) * e;
    // Re-orthogonalize once; classical Gram–Schmidt loses orthogonality.
    v -= v.dot(x) * x;
    for (const auto& e : frame) v -= v.dot(e) * e;
    if (v.norm() < 1e-6) continue;
    frame.push_back(v.normalized());
  }
  if (static_cast<int>(frame.size()) != dim - 1)
    throw Error(ErrorKind::InvalidParameter, "could not build a tangent frame");
  return frame;
}

double product_laplacian_fd(const ScalarFunction& phi, const ProductPoint& pt,
                            const ProblemParams& params, double h) {
  if (!(h > 1e-4 && h < 1e-1)) throw Error(ErrorKind::InvalidParameter, "h must lie in (1e-4, 1e-1)");
  const double u0 = phi(pt.x.dot(pt.y));
  double lap_x = 0, lap_y = 0;
  for (const auto& e : tangent_frame(pt.x))
    lap_x += phi(along(pt.x, e, h, pt.y)) - 2.0 * u0 + phi(along(pt.x, e, -h, pt.y));
  for (const auto& e : tangent_frame(pt.y))
    lap_y += phi(along(pt.y, e, h, pt.x)) - 2.0 * u0 + phi(along(pt.y, e, -h, pt.x));
  return (lap_x + lap_y / params.delta) / (h * h);
}

double product_gradient_sq_fd(const ScalarFunction& phi, const ProductPoint& pt,
                              const ProblemParams& params, double h) {
  if (!(h > 1e-4 && h < 1e-1)) throw Error(ErrorKind::InvalidParameter, "h must lie in (1e-4, 1e-1)");
  double gx = 0, gy = 0;
  for (const auto& e : tangent_frame(pt.x)) {
    const double d = (phi(along(pt.x, e, h, pt.y)) - phi(along(pt.x, e, -h, pt.y))) / (2.0 * h);
    gx += d * d;
  }
  for (const auto& e : tangent_frame(pt.y)) {
    const double d = (phi(along(pt.y, e, h, pt.x)) - phi(along(pt.y, e, -h, pt.x))) / (2.0 * h);
    gy += d * d;
  }
  return gx + gy / params.delta;
}

IdentityReport check_product_identities(const ProblemParams& params, int points, double h,
                                        std::uint64_t seed) {
  const auto pts = sample_points(params.n, points, seed);
  const double factor = metric_factor(params.delta);
  const ScalarFunction id = [](double t) { return t; };
  std::vector<std::array<double, 4>> err(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const double f = pts[i].x.dot(pts[i].y);
    const double lap = -params.n * factor * f;
    const double grad = factor * (1.0 - f * f);
    err[i] = {std::abs(product_laplacian_fd(id, pts[i], params, h) - lap),
              std::abs(product_laplacian_fd(id, pts[i], params, h / 2) - lap),
              std::abs(product_gradient_sq_fd(id, pts[i], params, h) - grad),
              std::abs(product_gradient_sq_fd(id, pts[i], params, h / 2) - grad)};
  });
  IdentityReport rep;
  rep.points = points;
  for (const auto& e : err) {
    rep.laplacian_sup = std::max(rep.laplacian_sup, e[0]);
    rep.laplacian_sup_half = std::max(rep.laplacian_sup_half, e[1]);
    rep.gradient_sup = std::max(rep.gradient_sup, e[2]);
    rep.gradient_sup_half = std::max(rep.gradient_sup_half, e[3]);
  }
  rep.laplacian_slope = std::log2(rep.laplacian_sup / rep.laplacian_sup_half);
  rep.gradient_slope = std::log2(rep.gradient_sup / rep.gradient_sup_half);
  return rep;
}

ResidualReport pde_residual_sampled(const ScalarFunction& phi, const ProblemParams& params, int m,
                                    double h, std::uint64_t seed) {
  const auto pts = sample_points(params.n, m, seed);
  std::vector<std::array<double, 2>> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    res[i] = {std::abs(pde_point_residual(phi, pts[i], params, h)),
              std::abs(pde_point_residual(phi, pts[i], params, h / 2))};
  });
  ResidualReport rep;
  std::ostringstream os;
  os << m << " random product points, h = " << h << " and " << h / 2;
  rep.sample = os.str();
  rep.samples = pts.size();
  double total = 0, sup_half = 0;
  for (const auto& r : res) {
    rep.sup_residual = std::max(rep.sup_residual, r[0]);
    sup_half = std::max(sup_half, r[1]);
    total += r[0];
  }
  rep.mean_residual = m > 0 ? total / m : 0.0;
  rep.equation_sup = rep.sup_residual;
  rep.sup_residual_half = sup_half;
  if (rep.sup_residual > 0 && sup_half > 0) rep.slope = std::log2(rep.sup_residual / sup_half);
  return rep;
}

ResidualReport pde_residual_sampled(const NodalSolution& solution, const ProblemParams& params,
                                    int m, double h, std::uint64_t seed) {
  const auto phi = phi_from_profile(Profile::from_trajectory(solution.trajectory));
  return pde_residual_sampled(phi.value, params, m, h, seed);
}

ResidualReport pde_residual_sampled(const DiscreteSolution& solution, const BvpGrid& grid, int m,
                                    double h, std::uint64_t seed) {
  std::vector<double> values(solution.u.data(), solution.u.data() + solution.u.size());
  const auto phi = phi_from_profile(Profile::from_values(grid.nodes(), std::move(values)));
  const ProblemParams params{grid.n, grid.delta, grid.p, solution.lambda};
  return pde_residual_sampled(phi.value, params, m, h, seed);
}

double distance_to_trajectory(const Eigen::VectorXd& u, const BvpGrid& grid, const Trajectory& t) {
  const auto profile = Profile::from_trajectory(t);
  double d = 0;
  for (int i = 0; i < grid.size(); ++i)
    d = std::max(d, std::abs(u[i] - profile.value(grid.node(i))));
  return d;
}

DiscreteVerification verify_discrete(const DiscreteSolution& solution, const BvpGrid& grid,
                                     const IntegratorConfig& config, double ode_tol,
                                     double distance_tol) {
  const ProblemParams params{grid.n, grid.delta, grid.p, solution.lambda};
  DiscreteVerification out;
  out.discrete_residual = solution.residual_norm;
  const auto shot = solve_two_sided(params, config, solution.u[0], solution.u[grid.N]);
  out.shooting = shot.trajectory;
  out.shooting_residual = ode_residual(shot.trajectory);
  out.distance_to_shooting = distance_to_trajectory(solution.u, grid, shot.trajectory);
  out.passed = out.shooting_residual.sup_residual <= ode_tol && out.distance_to_shooting <= distance_tol;
  return out;
}

} // namespace yamabe
