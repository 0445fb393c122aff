#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/io.hpp"
#include "plastica/rng.hpp"

namespace plastica {

enum class Interp { linear, constant };

inline std::string to_string(Interp i) {
  return i == Interp::linear ? "linear" : "constant";
}

inline Interp interp_from_string(const std::string& s) {
  if (s == "linear") return Interp::linear;
  if (s == "constant") return Interp::constant;
  throw Error("unknown interpolation '" + s + "'");
}

// A stimulus signal sampled on a uniform two-sided time grid. Immutable once
// built; safe to share across threads.
struct StimulusPath {
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 0.0;
  std::vector<Vec> values;  // one m-vector per grid node
  Interp interpolation = Interp::linear;
  std::optional<std::uint64_t> seed;  // present iff stochastic

  std::size_t size() const { return values.size(); }
  std::size_t dim() const { return values.empty() ? 0 : values[0].size(); }
  double time_at(std::size_t i) const {
    return t_min + static_cast<double>(i) * dt;
  }

  // Interpolated value at t. Throws DomainError outside [t_min, t_max].
  // Evaluations within a relative 1e-6 fraction of dt from a grid node snap
  // to the stored node value, so node times reproduce stored values exactly.
  Vec eval(double t) const {
    const double span_tol = 1e-9 * std::max({1.0, std::fabs(t_min), std::fabs(t_max)});
    if (t < t_min - span_tol || t > t_max + span_tol)
      throw DomainError("stimulus evaluated outside its domain", t, t_min, t_max);
    const std::size_t n = values.size();
    double u = (t - t_min) / dt;
    if (u < 0.0) u = 0.0;
    if (u > static_cast<double>(n - 1)) u = static_cast<double>(n - 1);
    const double r = std::round(u);
    if (std::fabs(u - r) <= 1e-6 && r >= 0.0 && r <= static_cast<double>(n - 1))
      return values[static_cast<std::size_t>(r)];
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    if (i > n - 2) i = n - 2;
    if (interpolation == Interp::constant) return values[i];
    const double th = u - static_cast<double>(i);
    Vec out(values[i].size());
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = (1.0 - th) * values[i][k] + th * values[i + 1][k];
    return out;
  }
};

namespace detail {
inline std::size_t grid_count(double t_min, double t_max, double dt) {
  if (!(dt > 0.0)) throw Error("stimulus grid requires dt > 0");
  if (!(t_min < t_max)) throw Error("stimulus grid requires t_min < t_max");
  const double steps = (t_max - t_min) / dt;
  const double r = std::round(steps);
  if (std::fabs(steps - r) > 1e-6)
    throw Error("stimulus window is not an integer number of steps");
  return static_cast<std::size_t>(r) + 1;
}
}  // namespace detail

// Samples f exactly at the grid times t_min + i*dt. Rejects non-finite
// values, naming the offending time.
inline StimulusPath make_deterministic_path(
    const std::function<Vec(double)>& f, double t_min, double t_max, double dt,
    Interp interp = Interp::linear) {
  StimulusPath p;
  p.t_min = t_min;
  p.t_max = t_max;
  p.dt = dt;
  p.interpolation = interp;
  const std::size_t n = detail::grid_count(t_min, t_max, dt);
  p.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = p.time_at(i);
    Vec v = f(t);
    if (!all_finite(v))
      throw NumericError("deterministic stimulus produced a non-finite value", t);
    p.values.push_back(std::move(v));
  }
  return p;
}

// Scalar convenience overload.
inline StimulusPath make_deterministic_path(
    const std::function<double(double)>& f, double t_min, double t_max,
    double dt, Interp interp = Interp::linear) {
  return make_deterministic_path(
      std::function<Vec(double)>([&f](double t) { return Vec{f(t)}; }), t_min,
      t_max, dt, interp);
}

// Scalar SDE d eta = h(eta) dt + sigma dW.
struct SdeSpec {
  std::function<double(double)> drift;  // h(u)
  double diffusion = 0.0;               // sigma_W, >= 0
  double eta0 = 0.0;                    // value at t_min
  double guard = 1e6;                   // |eta| beyond this aborts
};

// Drift with stable points at -1 and +1 and an unstable point at 0.
inline double double_well_drift(double u) { return 3.0 * (u - u * u * u) / 5.0; }

// Euler-Maruyama with fixed step. Gaussian increments are addressed by
// (seed, step index), so the same (spec, grid, seed) is bit-identical across
// runs and thread counts. diffusion = 0 reduces to explicit Euler for
// d eta/dt = h(eta).
inline StimulusPath simulate_sde_path(const SdeSpec& spec, double t_min,
                                      double t_max, double dt,
                                      std::uint64_t seed) {
  if (spec.diffusion < 0.0) throw Error("SDE diffusion must be >= 0");
  StimulusPath p;
  p.t_min = t_min;
  p.t_max = t_max;
  p.dt = dt;
  p.interpolation = Interp::linear;
  if (spec.diffusion > 0.0) p.seed = seed;
  const std::size_t n = detail::grid_count(t_min, t_max, dt);
  p.values.reserve(n);
  const double sqdt = std::sqrt(dt);
  double eta = spec.eta0;
  p.values.push_back(Vec{eta});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = spec.drift(eta);
    if (!std::isfinite(h))
      throw NumericError("SDE drift returned a non-finite value", p.time_at(i));
    eta += h * dt;
    if (spec.diffusion > 0.0)
      eta += spec.diffusion * sqdt * counter_normal(seed, i);
    if (!std::isfinite(eta) || std::fabs(eta) > spec.guard)
      throw NumericError("SDE path escaped the guard bound |eta| <= " +
                             fmt17(spec.guard),
                         p.time_at(i + 1));
    p.values.push_back(Vec{eta});
  }
  return p;
}

inline Vec eval_stimulus(const StimulusPath& p, double t) { return p.eval(t); }

// ---- CSV export/import (header `t,eta_1,...,eta_m`, 17-digit decimals) ----

inline std::string stimulus_to_csv(const StimulusPath& p) {
  std::string out = "t";
  for (std::size_t k = 1; k <= p.dim(); ++k)
    out += ",eta_" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += fmt17(p.time_at(i));
    for (double v : p.values[i]) out += "," + fmt17(v);
    out += "\n";
  }
  return out;
}

// Sidecar metadata; `spec` describes how the path was produced.
inline Json stimulus_sidecar(const StimulusPath& p, const Json& spec) {
  Json j;
  j["t_min"] = p.t_min;
  j["t_max"] = p.t_max;
  j["dt"] = p.dt;
  j["interpolation"] = to_string(p.interpolation);
  if (p.seed)
    j["seed"] = *p.seed;
  else
    j["seed"] = nullptr;
  j["spec"] = spec;
  return j;
}

inline StimulusPath stimulus_from_csv(const std::string& csv,
                                      Interp interp = Interp::linear,
                                      std::optional<std::uint64_t> seed = {}) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : csv) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.size() < 3) throw Error("stimulus CSV needs at least two rows");
  const auto header = split_csv_line(lines[0]);
  if (header.empty() || header[0] != "t")
    throw Error("stimulus CSV header must start with 't'");
  const std::size_t m = header.size() - 1;
  StimulusPath p;
  p.interpolation = interp;
  p.seed = seed;
  std::vector<double> times;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto cells = split_csv_line(lines[li]);
    if (cells.size() != m + 1)
      throw Error("stimulus CSV row " + std::to_string(li) +
                  " has wrong column count");
    times.push_back(parse_double(cells[0]));
    Vec v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = parse_double(cells[k + 1]);
    p.values.push_back(std::move(v));
  }
  if (times.size() < 2) throw Error("stimulus CSV needs at least two rows");
  p.t_min = times.front();
  p.t_max = times.back();
  p.dt = (p.t_max - p.t_min) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::fabs(times[i] - p.time_at(i)) > 1e-9 * std::max(1.0, std::fabs(times[i])))
      throw Error("stimulus CSV times are not uniformly spaced");
  return p;
}

}  // namespace plastica
