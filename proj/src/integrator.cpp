// SPDX-License-Identifier: Apache-2.0

#include "yamabe/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

// Dormand & Prince (1980) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Nørsett & Wanner, DOPRI5 contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

State2 combine(const State2& y, double h, std::initializer_list<std::pair<double, const State2*>> terms) {
  State2 out = y;
  for (const auto& [coef, k] : terms) {
    out[0] += h * coef * (*k)[0];
    out[1] += h * coef * (*k)[1];
  }
  return out;
}

bool finite(const State2& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

} // namespace

State2 DenseStep::operator()(double t) const {
  const double h = t1 - t0;
  const double theta = h != 0 ? (t - t0) / h : 0.0;
  const double theta1 = 1.0 - theta;
  State2 out{};
  for (int i = 0; i < 2; ++i) {
    out[i] = rcont_[0][i] +
             theta * (rcont_[1][i] +
                      theta1 * (rcont_[2][i] + theta * (rcont_[3][i] + theta1 * rcont_[4][i])));
  }
  return out;
}

State2 DormandPrince::integrate(const Rhs2& f, double t0, State2 y0, double t_end,
                                const StepCallback& on_step) {
  stats_ = {};
  if (!(t_end > t0)) return y0;

  const bool fixed = control_.fixed_step > 0;
  double h = fixed ? control_.fixed_step : control_.initial_step;
  double t = t0;
  State2 y = y0;
  State2 k1 = f(t, y);
  ++stats_.rhs_evaluations;
  const auto& stops = control_.stops;
  auto next_stop = std::upper_bound(stops.begin(), stops.end(), t);

  while (t < t_end) {
    if (stats_.accepted + stats_.rejected >= control_.max_steps) {
      std::ostringstream os;
      os << "step budget of " << control_.max_steps << " exhausted at r = " << t;
      throw Error(ErrorKind::IntegrationFailure, os.str());
    }
    bool last = false;
    double t_next = t + h;
    const double h_free = h;
    while (next_stop != stops.end() && *next_stop <= t) ++next_stop;
    if (t + h * (1.0 + 1e-9) >= t_end) {
      h = t_end - t;
      t_next = t_end;
      last = true;
    }
    if (next_stop != stops.end() && *next_stop < t_end && t + h * (1.0 + 1e-9) >= *next_stop) {
      h = *next_stop - t;
      t_next = *next_stop;
      last = false;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::IntegrationFailure, "step size underflow");
    }

    const State2 k2 = f(t + c2 * h, combine(y, h, {{a21, &k1}}));
    const State2 k3 = f(t + c3 * h, combine(y, h, {{a31, &k1}, {a32, &k2}}));
    const State2 k4 = f(t + c4 * h, combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State2 k5 =
        f(t + c5 * h, combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State2 k6 = f(t + h, combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                              {a65, &k5}}));
    const State2 y1 = combine(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State2 k7 = f(t + h, y1);
    stats_.rhs_evaluations += 6;

    double err = 0;
    if (!fixed) {
      for (int i = 0; i < 2; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc =
            control_.abs_tol + control_.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 2.0);
    }
    if (!finite(y1) || !std::isfinite(err)) {
      if (fixed) throw Error(ErrorKind::IntegrationFailure, "state became non-finite");
      ++stats_.rejected;
      h *= 0.2;
      continue;
    }

    if (fixed || err <= 1.0) {
      DenseStep step;
      step.t0 = t;
      step.t1 = t_next;
      step.y0 = y;
      step.y1 = y1;
      for (int i = 0; i < 2; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        step.rcont_[0][i] = y[i];
        step.rcont_[1][i] = ydiff;
        step.rcont_[2][i] = bspl;
        step.rcont_[3][i] = ydiff - h * k7[i] - bspl;
        step.rcont_[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      ++stats_.accepted;
      t = step.t1;
      y = y1;
      k1 = k7;
      on_step(step);
      if (last) break;
      const bool shortened = h < h_free;
      if (fixed) {
        h = h_free;
      } else {
        const double fac = std::clamp(err > 0 ? 0.9 * std::pow(err, -0.2) : 10.0, 0.2, 10.0);
        // A step cut short to land on a stop does not shrink the next one.
        h = shortened ? h_free * std::min(1.0, fac) : h * fac;
      }
    } else {
      ++stats_.rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
  return y;
}

} // namespace yamabe
