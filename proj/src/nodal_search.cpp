// SPDX-License-Identifier: Apache-2.0

#include "yamabe/nodal_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "yamabe/error.hpp"
#include "yamabe/parallel.hpp"
#include "yamabe/verify.hpp"

namespace yamabe {

namespace {

ShotSample sample_at(const ProblemParams& params, const IntegratorConfig& config, double alpha) {
  const auto shot = integrate_half(params, config, alpha);
  return {alpha, shot.zeros_half, shot.w_mid, shot.wp_mid};
}

std::vector<ShotSample> sample_many(const ProblemParams& params, const IntegratorConfig& config,
                                    const std::vector<double>& alphas) {
  std::vector<ShotSample> out(alphas.size());
  parallel_for(alphas.size(), [&](std::size_t i) { out[i] = sample_at(params, config, alphas[i]); });
  return out;
}

int sign_of(double v) { return (v > 0) - (v < 0); }

/// Bisection with a secant polish on f over [lo, hi], f(lo) and f(hi) of
/// opposite sign. Returns the α with the smallest |f| seen.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double flo,
                      double fhi, double tol) {
  double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  for (int it = 0; it < 200 && best_f > tol; ++it) {
    // Secant guess, kept only if it stays well inside the bracket.
    double x = hi - fhi * (hi - lo) / (fhi - flo);
    const double width = hi - lo;
    if (!(x > lo + 0.05 * width && x < hi - 0.05 * width) || it % 3 == 2) x = 0.5 * (lo + hi);
    if (x <= lo || x >= hi) break;
    const double fx = f(x);
    if (std::abs(fx) < best_f) {
      best_f = std::abs(fx);
      best = x;
    }
    if (sign_of(fx) == sign_of(flo)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  return best;
}

void certify(NodalSolution& sol, const CatalogOptions& options) {
  sol.residuals.boundary_slope = std::abs(sol.trajectory.wp.back());
  sol.residuals.ode_sup = ode_residual(sol.trajectory).sup_residual;
  const int zeros = count_sign_changes(sol.trajectory.w);
  const bool parity_ok = (sol.symmetry == Symmetry::Odd) == (sol.k % 2 == 1);
  sol.certified = zeros == sol.k && parity_ok && sol.residuals.midpoint <= options.midpoint_tol &&
                  sol.residuals.ode_sup <= options.ode_tol;
}

} // namespace

BandScan scan_bands(const ProblemParams& params, const IntegratorConfig& config,
                    double alpha_max, int initial_resolution, const ScanOptions& options) {
  const auto consts = derive_constants(params);
  if (!(alpha_max > consts.alpha_threshold)) {
    std::ostringstream os;
    os << "alpha_max must exceed the positivity threshold " << consts.alpha_threshold;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
  if (initial_resolution < 2) throw Error(ErrorKind::InvalidParameter, "resolution must be >= 2");

  BandScan scan;
  scan.alpha_max = alpha_max;
  scan.resolution = initial_resolution;

  std::vector<double> alphas(initial_resolution);
  for (int i = 0; i < initial_resolution; ++i)
    alphas[i] = 1.0 + (alpha_max - 1.0) * (i + 1) / initial_resolution;
  auto coarse = sample_many(params, config, alphas);
  std::vector<ShotSample> extra;
  long budget = options.shot_budget;

  // Boundary brackets, each with the counts on its two sides.
  struct Boundary {
    double lo, hi;
    int count_lo, count_hi;
  };
  std::vector<Boundary> found;

  std::function<void(ShotSample, ShotSample)> refine = [&](ShotSample a, ShotSample b) {
    if (a.count == b.count) return;
    const double width = b.alpha - a.alpha;
    if (std::abs(b.count - a.count) == 1 && width <= options.boundary_tol * b.alpha) {
      found.push_back({a.alpha, b.alpha, a.count, b.count});
      return;
    }
    if (budget-- <= 0) {
      scan.complete = false;
      found.push_back({a.alpha, b.alpha, a.count, b.count});
      return;
    }
    const auto mid = sample_at(params, config, 0.5 * (a.alpha + b.alpha));
    extra.push_back(mid);
    refine(a, mid);
    refine(mid, b);
  };
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) refine(coarse[i], coarse[i + 1]);

  if (!scan.complete) scan.note = "refinement budget exhausted; some boundaries are coarse";

  double lo = 1.0;
  int count = coarse.front().count;
  bool monotone = true;
  for (const auto& b : found) {
    scan.bands.push_back({lo, b.lo, count});
    scan.boundaries.emplace_back(b.lo, b.hi);
    if (b.count_hi < b.count_lo) monotone = false;
    lo = b.hi;
    count = b.count_hi;
  }
  scan.bands.push_back({lo, alpha_max, count});
  if (!monotone) {
    scan.note += scan.note.empty() ? "" : "; ";
    scan.note += "zero count is not monotone in alpha";
  }

  scan.samples = std::move(coarse);
  scan.samples.insert(scan.samples.end(), extra.begin(), extra.end());
  std::sort(scan.samples.begin(), scan.samples.end(),
            [](const ShotSample& x, const ShotSample& y) { return x.alpha < y.alpha; });
  return scan;
}

NodalSolution find_antisymmetric(std::pair<double, double> bracket, const ProblemParams& params,
                                 const IntegratorConfig& config, double tol) {
  auto [lo, hi] = bracket;
  if (lo > hi) std::swap(lo, hi);
  auto w_mid = [&](double a) { return integrate_half(params, config, a).w_mid; };
  const double flo = w_mid(lo), fhi = w_mid(hi);
  if (sign_of(flo) * sign_of(fhi) > 0) {
    std::ostringstream os;
    os << "w(pi/2) does not change sign on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::BracketInvalid, os.str());
  }
  const double alpha = bracketed_root(w_mid, lo, hi, flo, fhi, tol);
  const auto shot = integrate_half(params, config, alpha);

  NodalSolution sol;
  sol.alpha = alpha;
  sol.symmetry = Symmetry::Odd;
  sol.zeros_half = shot.zeros_half;
  sol.k = 2 * shot.zeros_half + 1;
  sol.residuals.midpoint = std::abs(shot.w_mid);
  sol.trajectory = extend_by_symmetry(shot, Symmetry::Odd, std::max(tol, sol.residuals.midpoint));
  return sol;
}

NodalSolution find_symmetric(std::pair<double, double> bracket, const ProblemParams& params,
                             const IntegratorConfig& config, double tol) {
  auto [lo, hi] = bracket;
  if (lo > hi) std::swap(lo, hi);
  const auto slo = integrate_half(params, config, lo);
  const auto shi = integrate_half(params, config, hi);
  if (sign_of(slo.wp_mid) * sign_of(shi.wp_mid) > 0) {
    std::ostringstream os;
    os << "w'(pi/2) does not change sign on [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::BracketInvalid, os.str());
  }
  if (slo.zeros_half != shi.zeros_half)
    throw Error(ErrorKind::BracketInvalid, "bracket endpoints have different zero counts");
  if (slo.zeros_half == 0)
    throw Error(ErrorKind::BracketInvalid, "bracket lies in the positive band; no nodal solution");

  auto wp_mid = [&](double a) { return integrate_half(params, config, a).wp_mid; };
  const double alpha = bracketed_root(wp_mid, lo, hi, slo.wp_mid, shi.wp_mid, tol);
  const auto shot = integrate_half(params, config, alpha);

  NodalSolution sol;
  sol.alpha = alpha;
  sol.symmetry = Symmetry::Even;
  sol.zeros_half = shot.zeros_half;
  sol.k = 2 * shot.zeros_half;
  sol.residuals.midpoint = std::abs(shot.wp_mid);
  sol.trajectory = extend_by_symmetry(shot, Symmetry::Even, std::max(tol, sol.residuals.midpoint));
  return sol;
}

NodalCatalog build_catalog(const ProblemParams& params, const IntegratorConfig& config,
                           int k_max, const CatalogOptions& options) {
  const auto consts = derive_constants(params);
  NodalCatalog cat;
  cat.params = params;
  cat.config = config;
  cat.options = options;
  if (k_max <= 0) return cat;

  // Antisymmetric solutions a_0 … a_J need the count to reach J + 1.
  const int needed = k_max / 2 + 1;
  const double base = 4.0 * consts.alpha_threshold;
  double alpha_max = options.alpha_max > 0 ? options.alpha_max : base;
  BandScan scan;
  for (;;) {
    const int resolution = options.alpha_max > 0
                               ? options.initial_resolution
                               : static_cast<int>(std::lround(options.initial_resolution *
                                                              std::max(1.0, alpha_max / base)));
    scan = scan_bands(params, config, alpha_max, resolution);
    if (options.alpha_max > 0 || scan.max_count() >= needed || alpha_max >= options.alpha_cap)
      break;
    alpha_max = std::min(2.0 * alpha_max, options.alpha_cap);
  }
  cat.alpha_max = scan.alpha_max;
  cat.resolution = scan.resolution;
  cat.scan = scan;

  // a_j: boundary where the count steps from j to j + 1.
  std::vector<std::pair<double, double>> a_brackets;
  for (std::size_t i = 0; i < scan.boundaries.size(); ++i) {
    if (scan.bands[i].count == static_cast<int>(a_brackets.size()) &&
        scan.bands[i + 1].count == scan.bands[i].count + 1)
      a_brackets.push_back(scan.boundaries[i]);
  }

  std::vector<NodalSolution> odd(a_brackets.size());
  parallel_for(a_brackets.size(), [&](std::size_t j) {
    odd[j] = find_antisymmetric(a_brackets[j], params, config, options.midpoint_tol);
  });

  // b_j: the first root of w'(π/2) above a_j inside (a_j, a_{j+1}).
  std::vector<std::optional<NodalSolution>> even(odd.empty() ? 0 : odd.size() - 1);
  parallel_for(even.size(), [&](std::size_t j) {
    const double lo = odd[j].alpha, hi = odd[j + 1].alpha;
    std::vector<double> alphas;
    for (const auto& s : scan.samples)
      if (s.alpha > a_brackets[j].second && s.alpha < a_brackets[j + 1].first)
        alphas.push_back(s.alpha);
    constexpr int kDense = 64;
    if (alphas.size() < kDense) {
      alphas.clear();
      for (int i = 1; i < kDense; ++i) alphas.push_back(lo + (hi - lo) * i / kDense);
    }
    ShotSample prev = sample_at(params, config, a_brackets[j].second);
    for (double a : alphas) {
      const auto cur = sample_at(params, config, a);
      if (cur.count == prev.count && sign_of(cur.wp_mid) * sign_of(prev.wp_mid) < 0) {
        even[j] = find_symmetric({prev.alpha, cur.alpha}, params, config, options.midpoint_tol);
        return;
      }
      prev = cur;
    }
  });

  for (int k = 1; k <= k_max; ++k) {
    const std::size_t j = static_cast<std::size_t>((k - 1) / 2);
    const NodalSolution* sol = nullptr;
    if (k % 2 == 1) {
      if (j < odd.size()) sol = &odd[j];
    } else if (j < even.size() && even[j]) {
      sol = &*even[j];
    }
    if (!sol) {
      cat.complete = false;
      cat.missing.push_back(k);
      continue;
    }
    NodalSolution entry = *sol;
    certify(entry, options);
    if (!entry.certified || entry.k != k) {
      cat.complete = false;
      cat.missing.push_back(k);
    }
    cat.entries.push_back(std::move(entry));
  }
  return cat;
}

} // namespace yamabe
