// SPDX-License-Identifier: Apache-2.0

#include "yamabe/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "yamabe/error.hpp"

namespace yamabe {

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

std::vector<double> node_derivative(std::span<const double> grid, std::span<const double> values,
                                    int order, int parity, int width) {
  const std::size_t n = grid.size();
  if (n != values.size() || n < 2)
    throw Error(ErrorKind::InvalidParameter, "grid and values must match");
  width = std::min<int>(width, static_cast<int>(n));
  const int half = width / 2;

  // Extended samples with reflected ghosts at the singular endpoints.
  std::vector<double> xs, vs;
  const bool at_zero = grid.front() == 0.0;
  const bool at_pi = std::abs(grid.back() - std::numbers::pi) < 1e-14;
  int offset = 0;
  if (at_zero) {
    for (int g = std::min<int>(half, static_cast<int>(n) - 1); g >= 1; --g) {
      xs.push_back(-grid[g]);
      vs.push_back(parity * values[g]);
      ++offset;
    }
  }
  xs.insert(xs.end(), grid.begin(), grid.end());
  vs.insert(vs.end(), values.begin(), values.end());
  if (at_pi) {
    for (int g = 1; g <= std::min<int>(half, static_cast<int>(n) - 1); ++g) {
      xs.push_back(2.0 * std::numbers::pi - grid[n - 1 - g]);
      vs.push_back(parity * values[n - 1 - g]);
    }
  }

  const int total = static_cast<int>(xs.size());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int center = static_cast<int>(i) + offset;
    const int lo = std::clamp(center - half, 0, total - width);
    const std::span<const double> nodes(xs.data() + lo, width);
    const auto w = fd_weights(xs[center], nodes, order);
    // Differences against the centre make derivatives of constants exact.
    const double base = order > 0 ? vs[center] : 0.0;
    double acc = 0;
    for (int j = 0; j < width; ++j) acc += w[order][j] * (vs[lo + j] - base);
    out[i] = acc;
  }
  return out;
}

Profile::Profile(std::vector<double> grid, std::vector<double> f, std::vector<double> f1,
                 std::vector<double> f2)
    : grid_(std::move(grid)), f_(std::move(f)), f1_(std::move(f1)), f2_(std::move(f2)) {}

Profile Profile::from_trajectory(const Trajectory& t) {
  auto f2 = node_derivative(t.grid, t.wp, 1, -1);
  return Profile(t.grid, t.w, t.wp, std::move(f2));
}

Profile Profile::from_values(std::vector<double> grid, std::vector<double> values) {
  auto f1 = node_derivative(grid, values, 1, 1);
  auto f2 = node_derivative(grid, values, 2, 1);
  return Profile(std::move(grid), std::move(values), std::move(f1), std::move(f2));
}

std::size_t Profile::locate(double r) const {
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - grid_.begin(), 1)) - 1;
  return std::min(idx, grid_.size() - 2);
}

template <int D>
double Profile::eval(double r) const {
  r = std::clamp(r, grid_.front(), grid_.back());
  const std::size_t i = locate(r);
  const double h = grid_[i + 1] - grid_[i];
  const double s = (r - grid_[i]) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  double b[6];
  if constexpr (D == 0) {
    b[0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    b[1] = s - 6 * s3 + 8 * s4 - 3 * s5;
    b[2] = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    b[3] = 10 * s3 - 15 * s4 + 6 * s5;
    b[4] = -4 * s3 + 7 * s4 - 3 * s5;
    b[5] = 0.5 * (s3 - 2 * s4 + s5);
  } else if constexpr (D == 1) {
    b[0] = -30 * s2 + 60 * s3 - 30 * s4;
    b[1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    b[2] = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    b[3] = 30 * s2 - 60 * s3 + 30 * s4;
    b[4] = -12 * s2 + 28 * s3 - 15 * s4;
    b[5] = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  } else {
    b[0] = -60 * s + 180 * s2 - 120 * s3;
    b[1] = -36 * s + 96 * s2 - 60 * s3;
    b[2] = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
    b[3] = 60 * s - 180 * s2 + 120 * s3;
    b[4] = -24 * s + 84 * s2 - 60 * s3;
    b[5] = 0.5 * (6 * s - 24 * s2 + 20 * s3);
  }
  const double v = b[0] * f_[i] + h * b[1] * f1_[i] + h * h * b[2] * f2_[i] + b[3] * f_[i + 1] +
                   h * b[4] * f1_[i + 1] + h * h * b[5] * f2_[i + 1];
  return v / std::pow(h, D);
}

double Profile::value(double r) const { return eval<0>(r); }
double Profile::d1(double r) const { return eval<1>(r); }
double Profile::d2(double r) const { return eval<2>(r); }

} // namespace yamabe
