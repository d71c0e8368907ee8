// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <vector>

namespace yamabe {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<State2(double, const State2&)>;

/// One accepted Dormand–Prince step together with its fourth-order
/// continuous extension, valid for t in [t0, t1].
class DenseStep {
public:
  double t0 = 0, t1 = 0;
  State2 y0{}, y1{};

  State2 operator()(double t) const;

private:
  friend class DormandPrince;
  std::array<State2, 5> rcont_{};
};

struct StepControl {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  long max_steps = 2'000'000;
  double initial_step = 1e-4;
  /// When positive the step size is held fixed (no error control).
  double fixed_step = 0;
  /// Ascending times every accepted step must land on exactly.
  std::vector<double> stops;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

/// Explicit Dormand–Prince 5(4) with FSAL and dense output.
class DormandPrince {
public:
  using StepCallback = std::function<void(const DenseStep&)>;

  explicit DormandPrince(StepControl control) : control_(control) {}

  /// Integrates y' = f(t, y) from (t0, y0) to t_end, calling on_step after
  /// every accepted step. Throws Error(IntegrationFailure) when the step
  /// budget is exhausted, the step underflows, or the state goes non-finite.
  State2 integrate(const Rhs2& f, double t0, State2 y0, double t_end,
                   const StepCallback& on_step);

  const IntegrationStats& stats() const { return stats_; }

private:
  StepControl control_;
  IntegrationStats stats_;
};

} // namespace yamabe
