// SPDX-License-Identifier: Apache-2.0

#include "yamabe/shooter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

double refine_zero(const DenseStep& step) {
  auto w_at = [&](double r) { return step(r)[0]; };
  double a = step.t0, b = step.t1;
  double fa = step.y0[0], fb = step.y1[0];
  std::uintmax_t iters = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(
      w_at, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(44), iters);
  return 0.5 * (lo + hi);
}

} // namespace

void validate(const IntegratorConfig& config) {
  if (!(config.eps_start > 0 && config.eps_start < 0.1))
    throw Error(ErrorKind::InvalidParameter, "eps_start must lie in (0, 0.1)");
  if (!(config.rel_tol > 0 && config.abs_tol > 0))
    throw Error(ErrorKind::InvalidParameter, "tolerances must be positive");
  if (config.max_steps <= 0) throw Error(ErrorKind::InvalidParameter, "max_steps must be positive");
  if (config.output_intervals < 4)
    throw Error(ErrorKind::InvalidParameter, "output_intervals must be at least 4");
  if (config.fixed_step < 0) throw Error(ErrorKind::InvalidParameter, "fixed_step must be >= 0");
}

const char* to_string(Symmetry s) { return s == Symmetry::Even ? "even" : "odd"; }

double nonlinearity(double w, double p) {
  if (w == 0.0) return 0.0;
  const double mag = std::exp((p - 1.0) * std::log(std::abs(w)));
  return std::copysign(mag, w) - w;
}

RadialModel nonlinear_model(const ProblemParams& params) {
  const double mu = derive_constants(params).mu;
  const double p = params.p;
  return {params.n, [mu, p](double w) { return mu * nonlinearity(w, p); },
          [mu, p](double w) {
            const double a = std::abs(w);
            return mu * ((a > 0 ? std::exp(p * std::log(a)) : 0.0) / p - 0.5 * w * w);
          },
          [mu, p](double w) {
            const double a = std::abs(w);
            return mu * ((p - 1.0) * (a > 0 ? std::exp((p - 2.0) * std::log(a)) : 0.0) - 1.0);
          }};
}

RadialModel linear_model(int n, double beta) {
  return {n, [beta](double w) { return beta * w; },
          [beta](double w) { return 0.5 * beta * w * w; }, [beta](double) { return beta; }};
}

StartupValues startup_expansion(const RadialModel& model, double alpha, double eps) {
  const int n = model.n;
  const double c = -model.forcing(alpha) / n;
  const double d = c * (2.0 * (n - 1) - 3.0 * model.slope(alpha)) / (n + 2);
  const double e2 = eps * eps;
  return {alpha + 0.5 * c * e2 + d * e2 * e2 / 24.0, c * eps + d * e2 * eps / 6.0};
}

StartupValues startup_expansion(const ProblemParams& params, double alpha, double eps) {
  return startup_expansion(nonlinear_model(params), alpha, eps);
}

ShotResult shoot_half(const RadialModel& model, const ProblemParams& params,
                      const IntegratorConfig& config, double alpha) {
  validate(config);
  const int n = model.n;
  const int m = config.output_intervals;
  const double dr = kHalfPi / m;

  ShotResult shot;
  shot.alpha = alpha;
  Trajectory& traj = shot.trajectory;
  traj.alpha = alpha;
  traj.params = params;
  traj.grid.resize(m + 1);
  traj.w.resize(m + 1);
  traj.wp.resize(m + 1);
  for (int i = 0; i <= m; ++i) traj.grid[i] = i * dr;
  traj.grid[m] = kHalfPi;

  const double eps = config.eps_start;
  int next = 0;
  while (next <= m && traj.grid[next] < eps) {
    const auto s = startup_expansion(model, alpha, traj.grid[next]);
    traj.w[next] = s.w;
    traj.wp[next] = s.wp;
    ++next;
  }
  traj.w[0] = alpha;
  traj.wp[0] = 0.0;

  const auto start = startup_expansion(model, alpha, eps);
  const Rhs2 rhs = [&](double r, const State2& y) -> State2 {
    return {y[1], -(n - 1) * std::cos(r) / std::sin(r) * y[1] - model.forcing(y[0])};
  };

  StepControl control;
  control.rel_tol = config.rel_tol;
  control.abs_tol = config.abs_tol;
  control.max_steps = config.max_steps;
  control.fixed_step = config.fixed_step;
  control.initial_step = config.fixed_step > 0 ? config.fixed_step : std::min(1e-3, eps);
  // Adaptive steps land on the output nodes so samples carry the step accuracy
  // rather than the lower accuracy of the interpolant.
  if (config.fixed_step <= 0) control.stops.assign(traj.grid.begin() + next, traj.grid.end() - 1);

  DormandPrince solver(control);
  const State2 end = solver.integrate(rhs, eps, {start.w, start.wp}, kHalfPi, [&](const DenseStep& step) {
    while (next <= m && traj.grid[next] <= step.t1) {
      const State2 y =
          next == m || traj.grid[next] == step.t1 ? step.y1 : step(traj.grid[next]);
      traj.w[next] = y[0];
      traj.wp[next] = y[1];
      ++next;
    }
    if ((step.y0[0] > 0 && step.y1[0] < 0) || (step.y0[0] < 0 && step.y1[0] > 0)) {
      const double z = refine_zero(step);
      if (z >= kHalfPi - kMidpointZeroTolerance) {
        shot.ambiguous_zero = true;
      } else {
        shot.zeros.push_back(z);
      }
    }
  });
  shot.stats = solver.stats();
  // Fill anything the dense output did not reach (only if the grid is finer than eps).
  for (; next <= m; ++next) {
    traj.w[next] = end[0];
    traj.wp[next] = end[1];
  }
  shot.w_mid = end[0];
  shot.wp_mid = end[1];
  if (alpha != 0.0 && std::abs(end[0]) <= kMidpointZeroTolerance * std::max(1.0, std::abs(end[1])))
    shot.ambiguous_zero = true;
  shot.zeros_half = static_cast<int>(shot.zeros.size());

  traj.energy.resize(m + 1);
  for (int i = 0; i <= m; ++i)
    traj.energy[i] = 0.5 * traj.wp[i] * traj.wp[i] + model.potential(traj.w[i]);
  return shot;
}

ShotResult integrate_half(const ProblemParams& params, const IntegratorConfig& config,
                          double alpha) {
  return shoot_half(nonlinear_model(params), params, config, alpha);
}

EnergyProfile energy_profile(const Trajectory& t) {
  const auto model = nonlinear_model(t.params);
  EnergyProfile out;
  out.energy.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out.energy[i] = 0.5 * t.wp[i] * t.wp[i] + model.potential(t.w[i]);
  const double mu = derive_constants(t.params).mu;
  const double p = t.params.p;
  const double a = std::abs(t.alpha);
  out.initial = a > 0 ? mu * a * a / p * (std::pow(a, p - 2.0) - p / 2.0) : 0.0;
  return out;
}

Trajectory extend_by_symmetry(const ShotResult& shot, Symmetry kind, double match_tol) {
  const double residual = kind == Symmetry::Even ? std::abs(shot.wp_mid) : std::abs(shot.w_mid);
  if (residual > match_tol) {
    std::ostringstream os;
    os << to_string(kind) << " reflection needs |" << (kind == Symmetry::Even ? "w'" : "w")
       << "(pi/2)| <= " << match_tol << ", got " << residual;
    throw Error(ErrorKind::SymmetryPreconditionViolated, os.str());
  }
  const Trajectory& half = shot.trajectory;
  const std::size_t m = half.size() - 1;
  Trajectory full;
  full.alpha = half.alpha;
  full.params = half.params;
  full.grid.resize(2 * m + 1);
  full.w.resize(2 * m + 1);
  full.wp.resize(2 * m + 1);
  full.energy.resize(2 * m + 1);
  const double value_sign = kind == Symmetry::Even ? 1.0 : -1.0;
  for (std::size_t i = 0; i <= m; ++i) {
    full.grid[i] = half.grid[i];
    full.w[i] = half.w[i];
    full.wp[i] = half.wp[i];
    full.energy[i] = half.energy[i];
  }
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t src = m - i;
    full.grid[m + i] = std::numbers::pi - half.grid[src];
    full.w[m + i] = value_sign * half.w[src];
    full.wp[m + i] = -value_sign * half.wp[src];
    full.energy[m + i] = half.energy[src];
  }
  full.grid[2 * m] = std::numbers::pi;
  full.wp[2 * m] = 0.0;
  if (kind == Symmetry::Odd) full.w[m] = 0.0;
  else full.wp[m] = 0.0;
  return full;
}

int count_sign_changes(const std::vector<double>& values) {
  int count = 0;
  int last = 0;
  for (double v : values) {
    const int s = (v > 0) - (v < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

double startup_consistency(const ProblemParams& params, const IntegratorConfig& config,
                           double alpha) {
  IntegratorConfig half = config;
  half.eps_start = config.eps_start / 2;
  const auto a = integrate_half(params, config, alpha);
  const auto b = integrate_half(params, half, alpha);
  return std::abs(a.w_mid - b.w_mid) + std::abs(a.wp_mid - b.wp_mid);
}

TwoSidedSolution solve_two_sided(const ProblemParams& params, const IntegratorConfig& config,
                                 double alpha_left, double alpha_right, double tol,
                                 int max_iterations) {
  const auto model = nonlinear_model(params);
  auto mismatch = [&](double a, double b) {
    const auto l = shoot_half(model, params, config, a);
    const auto r = shoot_half(model, params, config, b);
    return std::array<double, 2>{l.w_mid - r.w_mid, l.wp_mid + r.wp_mid};
  };
  auto norm = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };

  TwoSidedSolution sol;
  double a = alpha_left, b = alpha_right;
  auto f = mismatch(a, b);
  int it = 0;
  for (; it < max_iterations && norm(f) > tol; ++it) {
    const double ha = 1e-7 * std::max(1.0, std::abs(a));
    const double hb = 1e-7 * std::max(1.0, std::abs(b));
    const auto fa = mismatch(a + ha, b);
    const auto fb = mismatch(a, b + hb);
    const double j00 = (fa[0] - f[0]) / ha, j10 = (fa[1] - f[1]) / ha;
    const double j01 = (fb[0] - f[0]) / hb, j11 = (fb[1] - f[1]) / hb;
    const double det = j00 * j11 - j01 * j10;
    if (!std::isfinite(det) || det == 0.0)
      throw Error(ErrorKind::NoConvergence, "singular matching Jacobian in two-sided shooting");
    const double da = -(j11 * f[0] - j01 * f[1]) / det;
    const double db = -(-j10 * f[0] + j00 * f[1]) / det;
    double step = 1.0;
    const double f0 = norm(f);
    for (int k = 0; k < 30; ++k, step *= 0.5) {
      try {
        const auto trial = mismatch(a + step * da, b + step * db);
        if (norm(trial) < f0 || k == 29) {
          a += step * da;
          b += step * db;
          f = trial;
          break;
        }
      } catch (const Error&) {
      }
    }
  }
  if (norm(f) > tol) {
    std::ostringstream os;
    os << "two-sided shooting stalled at mismatch " << norm(f);
    throw Error(ErrorKind::NoConvergence, os.str());
  }

  const auto left = shoot_half(model, params, config, a);
  const auto right = shoot_half(model, params, config, b);
  const std::size_t m = left.trajectory.size() - 1;
  Trajectory& full = sol.trajectory;
  full.alpha = a;
  full.params = params;
  full.grid.resize(2 * m + 1);
  full.w.resize(2 * m + 1);
  full.wp.resize(2 * m + 1);
  full.energy.resize(2 * m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    full.grid[i] = left.trajectory.grid[i];
    full.w[i] = left.trajectory.w[i];
    full.wp[i] = left.trajectory.wp[i];
    full.energy[i] = left.trajectory.energy[i];
  }
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t src = m - i;
    full.grid[m + i] = std::numbers::pi - right.trajectory.grid[src];
    full.w[m + i] = right.trajectory.w[src];
    full.wp[m + i] = -right.trajectory.wp[src];
    full.energy[m + i] = right.trajectory.energy[src];
  }
  full.grid[2 * m] = std::numbers::pi;
  sol.alpha_left = a;
  sol.alpha_right = b;
  sol.mismatch = norm(f);
  sol.iterations = it;
  return sol;
}

} // namespace yamabe
