#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plastica/attractor.hpp"
#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/field.hpp"
#include "plastica/io.hpp"
#include "plastica/sampling.hpp"
#include "plastica/trajectory.hpp"

namespace plastica {

// Sampling certificate for one hypothesis over a declared compact domain.
// Not a proof: the report carries the sample count and the worst witness so
// a failure can be reproduced by re-evaluating the witness.
struct CheckReport {
  std::string name;
  std::string domain;
  std::size_t n_samples = 0;
  double worst_value = 0.0;
  Json worst_witness;  // named inputs of the worst sample
  bool passed = false;
  double tolerance = 0.0;
  Json details;  // optional extras (fitted constants, per-time results)

  Json to_json() const {
    Json j;
    j["name"] = name;
    j["domain"] = domain;
    j["n_samples"] = n_samples;
    j["worst_value"] = worst_value;
    j["worst_witness"] = worst_witness;
    j["passed"] = passed;
    j["tolerance"] = tolerance;
    if (!details.is_null()) j["details"] = details;
    return j;
  }
};

struct CheckOptions {
  std::size_t n_samples = 512;
  double tolerance = 1e-3;  // sampled inequalities
  int threads = 1;
};

namespace detail {

// Deterministic index-ordered max: the lowest sample index wins ties.
struct WorstTracker {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = static_cast<std::size_t>(-1);
  void offer(double v, std::size_t i) {
    if (v > value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

}  // namespace detail

// <a(x,t), x> <= -1 on the shell |x| in [r_star, r_star + 1], sampled over
// the given times.
inline CheckReport check_dissipativity_A2(const RhsSource& src, double r_star,
                                          const std::vector<double>& times,
                                          const CheckOptions& opts = {}) {
  if (src.dim == 0) throw Error("rhs source has no declared dimension");
  if (times.empty()) throw Error("dissipativity check needs sample times");
  const auto shell = shell_cloud(src.dim, r_star, r_star + 1.0, opts.n_samples);
  std::vector<double> vals(shell.size() * times.size());
  parallel_for(shell.size() * times.size(), opts.threads, [&](std::size_t i) {
    const std::size_t ti = i / shell.size();
    const std::size_t si = i % shell.size();
    vals[i] = dot(src.eval(shell[si], times[ti]), shell[si]);
  });
  detail::WorstTracker worst;
  for (std::size_t i = 0; i < vals.size(); ++i) worst.offer(vals[i], i);
  CheckReport rep;
  rep.name = "A2";
  rep.domain = "shell |x| in [" + fmt17(r_star) + ", " + fmt17(r_star + 1.0) +
               "], " + std::to_string(times.size()) + " times";
  rep.n_samples = vals.size();
  rep.worst_value = worst.value;
  rep.tolerance = opts.tolerance;
  rep.passed = worst.value <= -1.0 + opts.tolerance;
  const std::size_t ti = worst.index / shell.size();
  const std::size_t si = worst.index % shell.size();
  rep.worst_witness = Json{{"x", shell[si]}, {"t", times[ti]}};
  return rep;
}

// <f(x,t), x> <= 0 on the sphere |x| = radius: no outward flow through the
// boundary of the candidate absorbing ball.
inline CheckReport check_boundary_inward(const RhsSource& src, double radius,
                                         const std::vector<double>& times,
                                         const CheckOptions& opts = {}) {
  if (src.dim == 0) throw Error("rhs source has no declared dimension");
  const auto shell = shell_cloud(src.dim, radius, radius, opts.n_samples);
  std::vector<double> vals(shell.size() * times.size());
  parallel_for(shell.size() * times.size(), opts.threads, [&](std::size_t i) {
    const std::size_t ti = i / shell.size();
    const std::size_t si = i % shell.size();
    vals[i] = dot(src.eval(shell[si], times[ti]), shell[si]);
  });
  detail::WorstTracker worst;
  for (std::size_t i = 0; i < vals.size(); ++i) worst.offer(vals[i], i);
  CheckReport rep;
  rep.name = "invariance";
  rep.domain = "sphere |x| = " + fmt17(radius) + ", " +
               std::to_string(times.size()) + " times";
  rep.n_samples = vals.size();
  rep.worst_value = worst.value;
  rep.tolerance = opts.tolerance;
  rep.passed = worst.value <= opts.tolerance;
  const std::size_t ti = worst.index / shell.size();
  const std::size_t si = worst.index % shell.size();
  rep.worst_witness = Json{{"x", shell[si]}, {"t", times[ti]}};
  return rep;
}

// The plasticity right-hand side as a callable, for rule-level checks. For
// the potential rule this is c(a, z, y, t) = -k a - G(z - y) with a standing
// for the evolving gradient state.
inline std::function<Vec(const Vec&, const Vec&, const Vec&, double)> rule_c(
    const PlasticRule& rule) {
  if (rule.kind == PlasticRule::Kind::direct_custom) {
    if (!rule.custom_c) throw Error("custom rule has no right-hand side");
    return rule.custom_c;
  }
  const double k = rule.k, sigma = rule.sigma;
  return [k, sigma](const Vec& a, const Vec& z, const Vec& y, double) {
    Vec w(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = z[i] - y[i];
    const Vec G = gaussian_bump_grad(w, sigma);
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = -k * a[i] - G[i];
    return c;
  };
}

// Sampling domain for rule-level checks: balls for a and y, a shell or ball
// for x, and a time interval.
struct RuleDomain {
  std::size_t d = 1;        // dimension of a, x (and y for the built-in rules)
  double a_radius = 2.0;
  double x_radius = 2.0;    // ball for C2; shell [r_star, x_radius] for C4
  double y_radius = 2.0;
  double t_lo = 0.0;
  double t_hi = 1.0;

  std::string describe() const {
    return "|a|<=" + fmt17(a_radius) + ", |x|<=" + fmt17(x_radius) +
           ", |y|<=" + fmt17(y_radius) + ", t in [" + fmt17(t_lo) + ", " +
           fmt17(t_hi) + "]";
  }
};

namespace detail {

struct RuleSample {
  Vec a, x, y;
  double t;
};

// Joint low-discrepancy samples; prefixes are nested, so enlarging the
// sample count never loses a previously seen worst case.
inline RuleSample rule_sample(const RuleDomain& dom, std::uint64_t index,
                              double x_inner = 0.0) {
  const std::size_t d = dom.d;
  const Vec u = halton_point(index, 3 * d + 1);
  RuleSample s;
  s.a.resize(d);
  s.x.resize(d);
  s.y.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    s.a[k] = dom.a_radius * (2.0 * u[k] - 1.0);
    s.y[k] = dom.y_radius * (2.0 * u[2 * d + k] - 1.0);
  }
  if (x_inner > 0.0) {
    // shell sample |x| in [x_inner, dom.x_radius]
    const double u_dir2 = d >= 2 ? u[d + 1] : 0.5;
    const double u_rad = d == 1 ? std::fabs(2.0 * u[d] - 1.0) : u[2 * d - 1];
    const Vec dir = sphere_direction(u[d], u_dir2, d);
    const double r = x_inner + (dom.x_radius - x_inner) * u_rad;
    s.x = scaled(dir, r);
  } else {
    for (std::size_t k = 0; k < d; ++k)
      s.x[k] = dom.x_radius * (2.0 * u[d + k] - 1.0);
  }
  s.t = dom.t_lo + (dom.t_hi - dom.t_lo) * u[3 * d];
  return s;
}

}  // namespace detail

// Growth bound <a, c(a,x,y,t)> <= alpha |a|^2 + beta. With `given` constants
// the inequality is verified as stated; otherwise sufficient constants are
// fitted from the sampled upper envelope (tail slope, then offset) and
// reported in `details`. Superquadratic growth fails the check with an
// exponent estimate.
inline CheckReport check_growth_C2(
    const PlasticRule& rule, const RuleDomain& dom, const CheckOptions& opts = {},
    std::optional<std::pair<double, double>> given = {}) {
  const auto c = rule_c(rule);
  const std::size_t n = opts.n_samples;
  std::vector<double> v(n), s2(n);
  std::vector<detail::RuleSample> samples(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    samples[i] = detail::rule_sample(dom, i + 1);
    const Vec ci = c(samples[i].a, samples[i].x, samples[i].y, samples[i].t);
    v[i] = dot(samples[i].a, ci);
    s2[i] = norm2(samples[i].a);
  });

  CheckReport rep;
  rep.name = "C2";
  rep.domain = dom.describe();
  rep.n_samples = n;
  rep.tolerance = opts.tolerance;

  double alpha, beta;
  if (given) {
    alpha = given->first;
    beta = given->second;
  } else {
    // upper envelope over 8 bins of |a|^2, tail slope as alpha
    const std::size_t bins = 8;
    const double smax = *std::max_element(s2.begin(), s2.end());
    std::vector<double> env(bins, -std::numeric_limits<double>::infinity());
    std::vector<double> env_s(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t b = smax > 0.0 ? std::min(
          bins - 1, static_cast<std::size_t>(s2[i] / smax * bins)) : 0;
      if (v[i] > env[b]) env[b] = v[i];
      env_s[b] = std::max(env_s[b], s2[i]);
    }
    alpha = 0.0;
    bool have = false;
    for (std::size_t b = bins / 2; b + 1 < bins; ++b) {
      if (!std::isfinite(env[b]) || !std::isfinite(env[b + 1])) continue;
      if (env_s[b + 1] <= env_s[b]) continue;
      const double slope = (env[b + 1] - env[b]) / (env_s[b + 1] - env_s[b]);
      alpha = have ? std::max(alpha, slope) : slope;
      have = true;
    }
    beta = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) beta = std::max(beta, v[i] - alpha * s2[i]);
    if (!std::isfinite(beta)) beta = 0.0;
  }

  detail::WorstTracker worst;
  for (std::size_t i = 0; i < n; ++i) worst.offer(v[i] - alpha * s2[i] - beta, i);
  rep.worst_value = worst.value;
  rep.passed = worst.value <= opts.tolerance;

  // superquadratic growth detection on the positive envelope
  double exponent = 0.0;
  {
    std::vector<std::pair<double, double>> pos;  // (log |a|, log v)
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] > 0.0 && s2[i] > 1e-12) pos.push_back({0.5 * std::log(s2[i]), std::log(v[i])});
    if (pos.size() >= 8) {
      std::sort(pos.begin(), pos.end());
      const std::size_t half = pos.size() / 2;
      double max_lo = -1e300, max_hi = -1e300, s_lo = 0, s_hi = 0;
      for (std::size_t i = 0; i < half; ++i)
        if (pos[i].second > max_lo) { max_lo = pos[i].second; s_lo = pos[i].first; }
      for (std::size_t i = half; i < pos.size(); ++i)
        if (pos[i].second > max_hi) { max_hi = pos[i].second; s_hi = pos[i].first; }
      if (s_hi > s_lo) exponent = (max_hi - max_lo) / (s_hi - s_lo);
    }
  }
  if (!given && exponent > 2.25) rep.passed = false;

  const auto& w = samples[worst.index];
  rep.worst_witness = Json{{"a", w.a}, {"x", w.x}, {"y", w.y}, {"t", w.t}};
  rep.details = Json{{"alpha", alpha},
                     {"beta", beta},
                     {"fitted", !given.has_value()},
                     {"growth_exponent", exponent}};
  return rep;
}

// <c(a,x,y,t), x> <= 0 for |x| >= r_star.
inline CheckReport check_C4(const PlasticRule& rule, double r_star,
                            const RuleDomain& dom, const CheckOptions& opts = {}) {
  if (!(dom.x_radius > r_star))
    throw Error("C4 domain must extend beyond r_star");
  const auto c = rule_c(rule);
  const std::size_t n = opts.n_samples;
  std::vector<double> v(n);
  std::vector<detail::RuleSample> samples(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    samples[i] = detail::rule_sample(dom, i + 1, r_star);
    const Vec ci = c(samples[i].a, samples[i].x, samples[i].y, samples[i].t);
    v[i] = dot(ci, samples[i].x);
  });
  detail::WorstTracker worst;
  for (std::size_t i = 0; i < n; ++i) worst.offer(v[i], i);
  CheckReport rep;
  rep.name = "C4";
  rep.domain = "|x| in [" + fmt17(r_star) + ", " + fmt17(dom.x_radius) + "], " +
               dom.describe();
  rep.n_samples = n;
  rep.worst_value = worst.value;
  rep.tolerance = opts.tolerance;
  rep.passed = worst.value <= opts.tolerance;
  const auto& w = samples[worst.index];
  rep.worst_witness = Json{{"a", w.a}, {"x", w.x}, {"y", w.y}, {"t", w.t}};
  return rep;
}

// Jacobian symmetry d a_i/d z_j = d a_j/d z_i at interior nodes; a field has
// a potential only if this holds.
inline CheckReport check_symmetry_potential(const FieldGrid& grid,
                                            const CheckOptions& opts = {}) {
  const std::size_t d = grid.dim();
  if (d < 2) throw Error("symmetry check needs dimension >= 2");
  const auto jac = field_gradient(grid);
  detail::WorstTracker worst;
  const std::size_t n = grid.n_nodes();
  std::vector<double> defects(n, -std::numeric_limits<double>::infinity());
  for (std::size_t node = 0; node < n; ++node) {
    // interior only; one-sided boundary stencils mix truncation orders
    std::size_t rem = node;
    bool interior = true;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t idx = rem % grid.axes[k].n;
      rem /= grid.axes[k].n;
      if (idx == 0 || idx == grid.axes[k].n - 1) interior = false;
    }
    if (!interior) continue;
    double defect = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        defect = std::max(defect,
                          std::fabs(jac[(node * d + i) * d + j] -
                                    jac[(node * d + j) * d + i]));
    defects[node] = defect;
  }
  for (std::size_t node = 0; node < n; ++node)
    if (std::isfinite(defects[node])) worst.offer(defects[node], node);
  if (worst.index == static_cast<std::size_t>(-1))
    throw Error("symmetry check found no interior nodes (grid too coarse)");
  CheckReport rep;
  rep.name = "symmetry";
  rep.domain = "interior grid nodes";
  rep.n_samples = n;
  rep.worst_value = worst.value;
  rep.tolerance = opts.tolerance;
  rep.passed = worst.value <= opts.tolerance;
  rep.worst_witness = Json{{"z", grid.node_coord(worst.index)}, {"t", grid.t}};
  return rep;
}

struct PreservationOptions {
  double dt = 0.01;
  std::size_t n_times = 10;
  std::size_t n_samples = 256;
  double tolerance = 1e-3;
  int threads = 1;
};

// Evolves the field from a dissipative a0 and re-checks the dissipativity
// inequality at evenly spaced times. The witness of a failure is the first
// failing time with its worst shell sample.
inline CheckReport check_dissipativity_preservation(
    const PlasticRule& rule, const FieldGrid& a0, const StimulusPath& path,
    double t_end, double r_star, const PreservationOptions& opts = {}) {
  for (const auto& ax : a0.axes)
    if (ax.lo > -(r_star + 1.0) || ax.hi < r_star + 1.0)
      throw Error("grid box must contain the ball of radius r_star + 1");
  if (!(t_end > a0.t)) throw Error("t_end must exceed the grid time");

  CheckOptions copts;
  copts.n_samples = opts.n_samples;
  copts.tolerance = opts.tolerance;
  copts.threads = opts.threads;

  const double span = t_end - a0.t;
  const double check_every = span / static_cast<double>(opts.n_times);
  FieldGrid g = a0;
  CheckReport rep;
  rep.name = "preservation";
  rep.domain = "A2 on shell [" + fmt17(r_star) + ", " + fmt17(r_star + 1.0) +
               "] along the evolved field";
  rep.tolerance = opts.tolerance;
  rep.passed = true;
  rep.worst_value = -std::numeric_limits<double>::infinity();
  Json per_time = Json::array();

  StepOptions sopts;
  sopts.threads = opts.threads;
  double next_check = a0.t + check_every;
  std::size_t step_i = 0;
  const std::size_t total_steps =
      static_cast<std::size_t>(std::ceil(span / opts.dt - 1e-9));
  for (std::size_t chk = 0; chk < opts.n_times; ++chk) {
    while (step_i < total_steps && g.t < next_check - 1e-12) {
      const double step = std::min(opts.dt, next_check - g.t);
      g = step_field(g, rule, path, step, sopts);
      ++step_i;
    }
    RhsSource frozen = RhsSource::snapshot_source({g});
    CheckReport a2 = check_dissipativity_A2(frozen, r_star, {g.t}, copts);
    rep.n_samples += a2.n_samples;
    per_time.push_back(Json{{"t", g.t}, {"worst", a2.worst_value},
                            {"passed", a2.passed}});
    if (a2.worst_value > rep.worst_value) {
      rep.worst_value = a2.worst_value;
      rep.worst_witness = a2.worst_witness;
    }
    if (!a2.passed && rep.passed) {
      rep.passed = false;
      rep.details["first_failure_t"] = g.t;
    }
    next_check += check_every;
  }
  rep.details["per_time"] = per_time;
  return rep;
}

// Finite-difference consistency of a supplied gradient: central differences
// of f against grad_f at sampled (x, t). The computable surrogate for
// continuous differentiability.
inline CheckReport check_gradient_consistency_A1(
    const std::function<Vec(const Vec&, double)>& f,
    const std::function<std::vector<double>(const Vec&, double)>& grad_f,
    const Vec& box_lo, const Vec& box_hi, const std::vector<double>& times,
    const CheckOptions& opts = {}) {
  const std::size_t d = box_lo.size();
  const double h = 1e-5;
  const auto pts = box_cloud(box_lo, box_hi, opts.n_samples);
  detail::WorstTracker worst;
  std::vector<double> vals(pts.size() * times.size(), 0.0);
  parallel_for(pts.size() * times.size(), opts.threads, [&](std::size_t i) {
    const std::size_t ti = i / pts.size();
    const std::size_t pi = i % pts.size();
    const Vec& x = pts[pi];
    const auto jac = grad_f(x, times[ti]);
    double err = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const Vec fp = f(xp, times[ti]);
      const Vec fm = f(xm, times[ti]);
      for (std::size_t ii = 0; ii < d; ++ii) {
        const double fd = (fp[ii] - fm[ii]) / (2.0 * h);
        err = std::max(err, std::fabs(fd - jac[ii * d + j]));
      }
    }
    vals[i] = err;
  });
  for (std::size_t i = 0; i < vals.size(); ++i) worst.offer(vals[i], i);
  CheckReport rep;
  rep.name = "A1";
  rep.domain = "box samples, central differences h=" + fmt17(h);
  rep.n_samples = vals.size();
  rep.worst_value = worst.value;
  rep.tolerance = opts.tolerance;
  rep.passed = worst.value <= opts.tolerance;
  const std::size_t ti = worst.index / pts.size();
  const std::size_t pi = worst.index % pts.size();
  rep.worst_witness = Json{{"x", pts[pi]}, {"t", times[ti]}};
  return rep;
}

// Modulus-of-continuity surrogate for the rule right-hand side: the largest
// increment of c under perturbations of size h in the chosen argument slot
// must roughly halve when h halves. slot: 0 = a (C1), 1 = x (C3).
inline CheckReport check_smoothness_increment(const PlasticRule& rule,
                                              const RuleDomain& dom, int slot,
                                              const CheckOptions& opts = {}) {
  const auto c = rule_c(rule);
  const double h1 = 1e-3, h2 = 0.5e-3;
  auto max_increment = [&](double h) {
    double worst = 0.0;
    for (std::size_t i = 1; i <= opts.n_samples; ++i) {
      auto s = detail::rule_sample(dom, i);
      const Vec base = c(s.a, s.x, s.y, s.t);
      for (std::size_t j = 0; j < dom.d; ++j) {
        auto sp = s;
        (slot == 0 ? sp.a : sp.x)[j] += h;
        const Vec pert = c(sp.a, sp.x, sp.y, sp.t);
        double diff = 0.0;
        for (std::size_t k = 0; k < base.size(); ++k)
          diff = std::max(diff, std::fabs(pert[k] - base[k]));
        worst = std::max(worst, diff);
      }
    }
    return worst;
  };
  const double r1 = max_increment(h1);
  const double r2 = max_increment(h2);
  const double ratio = r1 > 0.0 ? r2 / r1 : 0.0;
  CheckReport rep;
  rep.name = slot == 0 ? "C1" : "C3";
  rep.domain = dom.describe();
  rep.n_samples = opts.n_samples;
  rep.worst_value = ratio;
  rep.tolerance = 0.75;  // Lipschitz behaviour gives ratio ~ 0.5
  rep.passed = ratio <= 0.75;
  rep.worst_witness = Json{{"h1", h1}, {"h2", h2}, {"r1", r1}, {"r2", r2}};
  return rep;
}

}  // namespace plastica
