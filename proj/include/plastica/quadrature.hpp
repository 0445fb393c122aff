#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "plastica/core.hpp"

namespace plastica {

// Simpson's rule on a single panel [a, b].
template <class F>
double simpson_panel(F&& f, double a, double b) {
  return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

// Integrates a Vec-valued integrand over [t0, t1] with one Simpson panel per
// cell of the uniform partition {grid_t0 + j*h}. Partial cells at the
// interval ends get their own (shorter) panels, so t0 and t1 need not be
// aligned with the partition. Anchoring panels to the cells matters when the
// integrand is only piecewise smooth across cell boundaries.
template <class F>
Vec simpson_on_cells(F&& f, double t0, double t1, double grid_t0, double h,
                     std::size_t dim) {
  Vec acc(dim, 0.0);
  if (t1 <= t0) return acc;
  double s = t0;
  // index of the first cell boundary strictly right of t0
  auto next_boundary = [&](double s_cur) {
    const double j = std::floor((s_cur - grid_t0) / h + 1e-12);
    double b = grid_t0 + (j + 1.0) * h;
    if (b <= s_cur + 1e-12 * h) b += h;
    return b;
  };
  while (s < t1 - 1e-12 * h) {
    const double e = std::min(t1, next_boundary(s));
    const Vec fa = f(s);
    const Vec fm = f(0.5 * (s + e));
    const Vec fb = f(e);
    const double w = (e - s) / 6.0;
    for (std::size_t i = 0; i < dim; ++i)
      acc[i] += w * (fa[i] + 4.0 * fm[i] + fb[i]);
    s = e;
  }
  return acc;
}

}  // namespace plastica
