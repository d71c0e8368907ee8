// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "yamabe/params.hpp"
#include "yamabe/shooter.hpp"

namespace yamabe {

/// An α-interval on which every sampled shot has the same number of zeros
/// in (0, π/2).
struct ZeroBand {
  double lo = 0;
  double hi = 0;
  int count = 0;
};

/// What a single shot contributes to the scan.
struct ShotSample {
  double alpha = 0;
  int count = 0;
  double w_mid = 0;
  double wp_mid = 0;
};

struct BandScan {
  std::vector<ZeroBand> bands;
  /// Brackets (lo, hi) of width ≤ boundary_tol across which the count
  /// steps from bands[i].count to bands[i+1].count.
  std::vector<std::pair<double, double>> boundaries;
  std::vector<ShotSample> samples;  // sorted by α
  double alpha_max = 0;
  int resolution = 0;
  bool complete = true;
  std::string note;

  int max_count() const { return bands.empty() ? 0 : bands.back().count; }
};

struct ScanOptions {
  double boundary_tol = 1e-7;  // relative width of refined boundary brackets
  long shot_budget = 20000;    // refinement shots before giving up
};

BandScan scan_bands(const ProblemParams& params, const IntegratorConfig& config,
                    double alpha_max, int initial_resolution, const ScanOptions& options = {});

struct NodalResiduals {
  double midpoint = 0;        // |w(π/2)| (odd) or |w'(π/2)| (even)
  double boundary_slope = 0;  // |w'(π)|
  double ode_sup = 0;         // sup-residual of the radial equation
};

struct NodalSolution {
  int k = 0;  // zeros in (0, π)
  double alpha = 0;
  Symmetry symmetry = Symmetry::Odd;
  int zeros_half = 0;
  Trajectory trajectory;  // on [0, π]
  NodalResiduals residuals;
  bool certified = false;
};

/// Root of α ↦ w_α(π/2) inside the bracket, reflected oddly. Throws
/// Error(BracketInvalid) without a sign change.
NodalSolution find_antisymmetric(std::pair<double, double> bracket, const ProblemParams& params,
                                 const IntegratorConfig& config, double tol = 1e-10);

/// Root of α ↦ w'_α(π/2) inside the bracket, reflected evenly. The two
/// endpoints must share their zero count, which must be positive.
NodalSolution find_symmetric(std::pair<double, double> bracket, const ProblemParams& params,
                             const IntegratorConfig& config, double tol = 1e-10);

struct CatalogOptions {
  double alpha_max = 0;  // 0 selects the adaptive doubling schedule
  int initial_resolution = 200;
  double midpoint_tol = 1e-10;
  double ode_tol = 1e-6;
  double alpha_cap = 1e6;
};

struct NodalCatalog {
  ProblemParams params;
  IntegratorConfig config;
  CatalogOptions options;
  std::vector<NodalSolution> entries;  // entries[i].k == i + 1 when complete
  double alpha_max = 0;
  int resolution = 0;
  BandScan scan;
  bool complete = true;
  std::vector<int> missing;
};

/// Certified solutions with exactly k = 1 … k_max zeros in (0, π).
NodalCatalog build_catalog(const ProblemParams& params, const IntegratorConfig& config,
                           int k_max, const CatalogOptions& options = {});

} // namespace yamabe
