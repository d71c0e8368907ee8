// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "yamabe/integrator.hpp"
#include "yamabe/params.hpp"

namespace yamabe {

struct IntegratorConfig {
  double eps_start = 1e-4;  // offset from the singular endpoint r = 0
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  long max_steps = 2'000'000;
  int output_intervals = 2048;  // uniform samples on [0, π/2]
  double fixed_step = 0;        // > 0 disables step-size control
};

void validate(const IntegratorConfig& config);

/// w'' + (n-1) cot(r) w' + forcing(w) = 0. The potential V (V' = forcing)
/// defines the energy ½w'² + V(w).
struct RadialModel {
  int n = 2;
  std::function<double(double)> forcing;
  std::function<double(double)> potential;
  std::function<double(double)> slope;  // d forcing / dw
};

RadialModel nonlinear_model(const ProblemParams& params);
/// The linearized (eigenvalue) equation w'' + (n-1) cot(r) w' + β w = 0.
RadialModel linear_model(int n, double beta);

/// Samples of a radial profile. Built by the shooter on [0, π/2] or, after
/// reflection, on [0, π].
struct Trajectory {
  std::vector<double> grid;
  std::vector<double> w;
  std::vector<double> wp;
  std::vector<double> energy;
  double alpha = 0;
  ProblemParams params;

  std::size_t size() const { return grid.size(); }
};

struct ShotResult {
  double alpha = 0;
  int zeros_half = 0;          // strict sign changes in (0, π/2), ambiguous one excluded
  std::vector<double> zeros;   // refined locations of the counted zeros
  bool ambiguous_zero = false; // a zero sits within tolerance of π/2
  double w_mid = 0;
  double wp_mid = 0;
  Trajectory trajectory;
  IntegrationStats stats;
};

enum class Symmetry { Even, Odd };

const char* to_string(Symmetry s);

/// sign(w)|w|^{p-1} - w.
double nonlinearity(double w, double p);

struct StartupValues {
  double w = 0;
  double wp = 0;
};

/// Regular expansion at r = 0 with c = w''(0) = -forcing(α)/n:
/// w(ε) = α + cε²/2 + dε⁴/24 and w'(ε) = cε + dε³/6, where
/// d = c(2(n-1) - 3 slope(α))/(n+2).
StartupValues startup_expansion(const RadialModel& model, double alpha, double eps);
StartupValues startup_expansion(const ProblemParams& params, double alpha, double eps);

/// Zeros this close to π/2 cannot be attributed to either side.
inline constexpr double kMidpointZeroTolerance = 1e-9;

ShotResult shoot_half(const RadialModel& model, const ProblemParams& params,
                      const IntegratorConfig& config, double alpha);

/// Integrates the radial equation from w(0) = α, w'(0) = 0 up to π/2.
ShotResult integrate_half(const ProblemParams& params, const IntegratorConfig& config,
                          double alpha);

struct EnergyProfile {
  std::vector<double> energy;
  double initial = 0;  // μα²/p (α^{p-2} - p/2)
};

EnergyProfile energy_profile(const Trajectory& t);

/// Builds the solution on [0, π] from a half shot by reflection across π/2.
/// Even requires |w'(π/2)| ≤ match_tol, odd requires |w(π/2)| ≤ match_tol.
Trajectory extend_by_symmetry(const ShotResult& shot, Symmetry kind, double match_tol = 1e-8);

/// Strict sign changes between consecutive nonzero samples.
int count_sign_changes(const std::vector<double>& values);

/// |Δw(π/2)| + |Δw'(π/2)| between start offsets ε and ε/2.
double startup_consistency(const ProblemParams& params, const IntegratorConfig& config,
                           double alpha);

/// Neumann solution on [0, π] found by shooting from both singular
/// endpoints and matching value and slope at π/2.
struct TwoSidedSolution {
  double alpha_left = 0;   // w(0)
  double alpha_right = 0;  // w(π)
  double mismatch = 0;
  int iterations = 0;
  Trajectory trajectory;  // on [0, π]
};

TwoSidedSolution solve_two_sided(const ProblemParams& params, const IntegratorConfig& config,
                                 double alpha_left, double alpha_right, double tol = 1e-11,
                                 int max_iterations = 50);

} // namespace yamabe
