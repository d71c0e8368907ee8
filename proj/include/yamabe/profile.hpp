// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "yamabe/shooter.hpp"

namespace yamabe {

/// Finite-difference weights (Fornberg) for derivatives 0 … max_order at z
/// from arbitrary distinct nodes. Returned row-major: weights[d][j].
std::vector<std::vector<double>> fd_weights(double z, std::span<const double> nodes,
                                            int max_order);

/// d-th derivative of sampled values at every node, from a local stencil of
/// `width` nodes. Where the grid starts at r = 0 or ends at r = π the samples
/// are continued by reflection with the given parity (+1 even, -1 odd).
std::vector<double> node_derivative(std::span<const double> grid, std::span<const double> values,
                                    int order, int parity, int width = 9);

/// C² piecewise quintic Hermite interpolant of a radial profile on its grid.
class Profile {
public:
  /// Uses (w, w') from the trajectory and w'' reconstructed from w'.
  static Profile from_trajectory(const Trajectory& t);
  /// Uses samples only; derivatives reconstructed from the values.
  static Profile from_values(std::vector<double> grid, std::vector<double> values);

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;

  double front() const { return grid_.front(); }
  double back() const { return grid_.back(); }

private:
  Profile(std::vector<double> grid, std::vector<double> f, std::vector<double> f1,
          std::vector<double> f2);
  std::size_t locate(double r) const;
  template <int D>
  double eval(double r) const;

  std::vector<double> grid_, f_, f1_, f2_;
};

} // namespace yamabe
