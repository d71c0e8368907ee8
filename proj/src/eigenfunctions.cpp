// SPDX-License-Identifier: Apache-2.0

#include "yamabe/eigenfunctions.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "yamabe/error.hpp"

namespace yamabe {

namespace {

using Poly = std::vector<Rational>;  // index = power

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly derivative(const Poly& p) {
  Poly d(p.size() > 1 ? p.size() - 1 : 0);
  for (std::size_t j = 1; j < p.size(); ++j) d[j - 1] = p[j] * static_cast<long long>(j);
  trim(d);
  return d;
}

Poly remainder(Poly a, const Poly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[j + shift] -= factor * b[j];
    a.pop_back();
    trim(a);
  }
  return a;
}

Rational evaluate(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<Poly> sturm_sequence(Poly p) {
  trim(p);
  std::vector<Poly> seq{p, derivative(p)};
  while (!seq.back().empty()) {
    Poly r = remainder(seq[seq.size() - 2], seq.back());
    for (auto& c : r) c = -c;
    if (r.empty()) break;
    seq.push_back(std::move(r));
  }
  return seq;
}

int sign_variations(const std::vector<Poly>& seq, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& p : seq) {
    const Rational v = evaluate(p, x);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

} // namespace

long long beta(int n, int k) {
  if (k < 0) throw Error(ErrorKind::InvalidParameter, "k must be non-negative");
  return static_cast<long long>(k) * (n + k - 1);
}

double EigenPoly::at_x(double x) const {
  double acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double EigenPoly::derivative_at_x(double x) const {
  double acc = 0;
  for (std::size_t j = coeffs.size(); j-- > 1;) acc = acc * x + coeffs[j] * static_cast<double>(j);
  return acc;
}

double EigenPoly::operator()(double r) const { return at_x(std::cos(r)); }

double EigenPoly::derivative(double r) const { return -std::sin(r) * derivative_at_x(std::cos(r)); }

EigenPoly eigenpoly(int n, int k) {
  if (n < 2) throw Error(ErrorKind::InvalidParameter, "n must be at least 2");
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "k must be at least 1");
  const long long bk = beta(n, k);
  std::vector<Rational> c(k + 1, Rational(0));
  c[k] = 1;
  for (int j = k - 2; j >= 0; j -= 2) {
    const long long num = static_cast<long long>(j + 2) * (j + 1);
    c[j] = -Rational(num) * c[j + 2] / Rational(bk - beta(n, j));
  }
  Rational sum = 0;
  for (const auto& v : c) sum += v;
  for (auto& v : c) v /= sum;

  EigenPoly poly;
  poly.n = n;
  poly.k = k;
  poly.exact = c;
  poly.coeffs.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) poly.coeffs[j] = c[j].convert_to<double>();
  return poly;
}

RootReport zero_count(const EigenPoly& poly) {
  const auto seq = sturm_sequence(poly.exact);
  struct Interval {
    Rational a, b;
    int va, vb;
  };
  // Roots in (a, b] number V(a) - V(b); ±1 are never roots since w(0) = 1
  // and |w(π)| = 1.
  std::vector<Interval> work{{Rational(-1), Rational(1), sign_variations(seq, Rational(-1)),
                              sign_variations(seq, Rational(1))}};
  std::vector<std::pair<Rational, Rational>> isolated;
  while (!work.empty()) {
    Interval iv = work.back();
    work.pop_back();
    const int count = iv.va - iv.vb;
    if (count <= 0) continue;
    if (count == 1) {
      isolated.emplace_back(iv.a, iv.b);
      continue;
    }
    if (iv.b - iv.a < Rational(1, 1LL << 50))
      throw Error(ErrorKind::RootFindingFailure, "could not isolate a multiple root");
    const Rational mid = (iv.a + iv.b) / 2;
    const int vm = sign_variations(seq, mid);
    work.push_back({iv.a, mid, iv.va, vm});
    work.push_back({mid, iv.b, vm, iv.vb});
  }

  const auto sign = [](auto v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); };
  const auto f = [&](double x) { return poly.at_x(x); };
  RootReport report;
  for (auto [a, b] : isolated) {
    // Shrink exactly until rounded evaluation agrees with the exact signs.
    int sa = sign(evaluate(poly.exact, a)), sb = sign(evaluate(poly.exact, b));
    std::optional<double> exact_root;
    for (int it = 0; it < 64; ++it) {
      if (sb == 0) {
        exact_root = b.convert_to<double>();
        break;
      }
      if (sa != 0 && sign(f(a.convert_to<double>())) == sa &&
          sign(f(b.convert_to<double>())) == sb)
        break;
      const Rational mid = (a + b) / 2;
      const int sm = sign(evaluate(poly.exact, mid));
      if (sm == 0) {
        exact_root = mid.convert_to<double>();
        break;
      }
      if (sign_variations(seq, a) - sign_variations(seq, mid) == 1) {
        b = mid;
        sb = sm;
      } else {
        a = mid;
        sa = sm;
      }
    }
    if (exact_root) {
      report.roots.push_back(std::acos(*exact_root));
      continue;
    }
    const double da = a.convert_to<double>(), db = b.convert_to<double>();
    const double fa = f(da), fb = f(db);
    if (fa * fb > 0) {
      report.roots.push_back(std::acos(0.5 * (da + db)));
      continue;
    }
    std::uintmax_t iters = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(
        f, da, db, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    report.roots.push_back(std::acos(0.5 * (lo + hi)));
  }
  std::sort(report.roots.begin(), report.roots.end());
  report.count = static_cast<int>(report.roots.size());
  for (double r : report.roots) {
    const double slope = poly.derivative(r);
    report.slopes.push_back(slope);
    if (std::abs(slope) < 1e-8) report.all_simple = false;
  }
  return report;
}

InterlaceReport sturm_interlace(int n, int m, int l) {
  if (!(1 <= m && m < l)) {
    std::ostringstream os;
    os << "interlacing needs 1 <= m < l, got m = " << m << ", l = " << l;
    throw Error(ErrorKind::InvalidParameter, os.str());
  }
  const auto zm = zero_count(eigenpoly(n, m)).roots;
  const auto zl = zero_count(eigenpoly(n, l)).roots;
  InterlaceReport report;
  for (std::size_t i = 0; i + 1 < zm.size(); ++i) {
    ++report.gaps_checked;
    const bool hit = std::any_of(zl.begin(), zl.end(),
                                 [&](double r) { return r > zm[i] && r < zm[i + 1]; });
    if (!hit && report.holds) {
      report.holds = false;
      report.first_failing_gap = static_cast<int>(i);
    }
  }
  return report;
}

ParityReport endpoint_parity(const EigenPoly& poly) {
  bool even = true, odd = true;
  for (std::size_t j = 0; j < poly.exact.size(); ++j) {
    if (poly.exact[j] == 0) continue;
    if (j % 2 == 0) odd = false;
    else even = false;
  }
  ParityReport report;
  report.symmetry = even && !odd ? Symmetry::Even : Symmetry::Odd;
  report.w_pi = poly.at_x(-1.0);
  return report;
}

} // namespace yamabe
