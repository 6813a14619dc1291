// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Gauss-Kronrod (G7/K15) quadrature.  The generator integrands
// carry a 1/s^2 pole at 0 and a 1/sqrt(b^2-s^2) wall at s = +-b; anchors
// keep integration paths strictly between them, so plain bisection-adaptive
// G7K15 reaches the 1e-11 absolute tolerances the solution formulas need.

#ifndef FINSLER_QUADRATURE_HPP
#define FINSLER_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

namespace detail {

// K15 abscissae and weights; the even positions are the embedded G7 nodes.
inline constexpr double kGK15Nodes[15] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double kGK15Weights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double kG7Weights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double gk = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(mid + half * kGK15Nodes[i]);
    gk += kGK15Weights[i] * fx;
    if (i % 2 == 1) g += kG7Weights[i / 2] * fx;
  }
  gk *= half;
  g *= half;
  // a non-finite panel still needs to subdivide; a large finite error
  // keeps the bookkeeping arithmetic sane
  if (!std::isfinite(gk) || !std::isfinite(g)) return {a, b, 0.0, 1e300};
  return {a, b, gk, std::abs(gk - g)};
}

}  // namespace detail

/// Integrate f over [a, b] (either orientation) to absolute tolerance.
/// Throws NumericError when the interval budget is exhausted.
template <typename F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-11,
                 int max_intervals = 4000) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<detail::Segment> queue;
  queue.push(detail::gk15(f, a, b));
  double total_err = queue.top().error;
  int n = 1;
  while (total_err > abs_tol) {
    if (n >= max_intervals)
      throw NumericError("quadrature did not converge on [" +
                         std::to_string(a) + ", " + std::to_string(b) +
                         "]: error " + std::to_string(total_err));
    detail::Segment worst = queue.top();
    queue.pop();
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    auto s1 = detail::gk15(f, worst.a, mid);
    auto s2 = detail::gk15(f, mid, worst.b);
    total_err += s1.error + s2.error;
    queue.push(s1);
    queue.push(s2);
    ++n;
  }
  double sum = 0.0;
  std::vector<detail::Segment> segs;
  segs.reserve(queue.size());
  while (!queue.empty()) {
    segs.push_back(queue.top());
    queue.pop();
  }
  // Fixed summation order keeps results independent of heap layout.
  std::sort(segs.begin(), segs.end(),
            [](const detail::Segment& x, const detail::Segment& y) {
              return x.a < y.a;
            });
  for (const auto& s : segs) sum += s.value;
  return sign * sum;
}

}  // namespace finsler

#endif
