#pragma once

#include "plastica/core.hpp"

namespace plastica {

// One classical fourth-order Runge-Kutta step of dx/dt = f(x, t).
template <class F>
Vec rk4_step(F&& f, const Vec& x, double t, double dt) {
  const std::size_t n = x.size();
  const Vec k1 = f(x, t);
  Vec xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * dt * k1[i];
  const Vec k2 = f(xs, t + 0.5 * dt);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * dt * k2[i];
  const Vec k3 = f(xs, t + 0.5 * dt);
  for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + dt * k3[i];
  const Vec k4 = f(xs, t + dt);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  return out;
}

}  // namespace plastica
