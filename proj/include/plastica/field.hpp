#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/io.hpp"
#include "plastica/quadrature.hpp"
#include "plastica/rk4.hpp"
#include "plastica/stimulus.hpp"

namespace plastica {

// One uniform grid axis with n nodes at lo + j*h.
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  double h() const { return (hi - lo) / static_cast<double>(n - 1); }
  double coord(std::size_t j) const { return lo + static_cast<double>(j) * h(); }
};

enum class TimeFactor { one_over_t, constant };

// Right-hand side of the field equation da/dt = c(a, z, y, t).
//
// potential_linear evolves a scalar potential per node,
//   du/dt = -k u - g(z - eta(t)),
// together with its spatial gradient as a companion per-node ODE,
//   d(grad u)/dt = -k grad u - G(z - eta(t)),
// and derives the velocity field as a = -factor(t) * grad u. The companion
// ODE is the declared gradient method; finite differences of u serve as a
// consistency check, not as the data source.
struct PlasticRule {
  enum class Kind { potential_linear, direct_custom };
  Kind kind = Kind::potential_linear;
  double k = 0.0;      // decay rate, >= 0
  double sigma = 1.0;  // Gaussian width, > 0
  TimeFactor time_factor = TimeFactor::constant;
  double gamma = 1.0;    // factor value when constant
  double t_floor = 1.0;  // earliest time at which the 1/t factor is defined
  std::function<Vec(const Vec& a, const Vec& z, const Vec& y, double t)> custom_c;

  bool factor_defined_at(double t) const {
    return time_factor == TimeFactor::constant || t >= t_floor;
  }
  double factor(double t) const {
    if (time_factor == TimeFactor::constant) return gamma;
    if (t < t_floor)
      throw DomainError("1/t field factor requested below its floor", t,
                        t_floor, std::numeric_limits<double>::infinity());
    return 1.0 / t;
  }
};

// Snapshot of the plastic field on a grid at one instant. Node storage is
// flat with the first axis fastest; values for node i occupy a[i*d .. i*d+d).
struct FieldGrid {
  std::vector<Axis> axes;
  double t = 0.0;
  std::vector<double> a;       // d per node
  std::vector<double> u;       // optional potential, 1 per node
  std::vector<double> grad_u;  // optional potential gradient, d per node
  bool a_valid = true;         // false while the 1/t factor is undefined

  std::size_t dim() const { return axes.size(); }
  std::size_t n_nodes() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.n;
    return n;
  }
  bool has_potential() const { return !u.empty(); }

  Vec node_coord(std::size_t node) const {
    Vec z(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) {
      z[k] = axes[k].coord(node % axes[k].n);
      node /= axes[k].n;
    }
    return z;
  }
  Vec a_at(std::size_t node) const {
    const std::size_t d = dim();
    return Vec(a.begin() + node * d, a.begin() + (node + 1) * d);
  }
  Vec grad_u_at(std::size_t node) const {
    const std::size_t d = dim();
    return Vec(grad_u.begin() + node * d, grad_u.begin() + (node + 1) * d);
  }
};

inline void validate_grid(const FieldGrid& g) {
  if (g.axes.empty()) throw Error("field grid needs at least one axis");
  for (const auto& ax : g.axes) {
    if (ax.n < 2) throw Error("field grid axes need at least two nodes");
    if (!(ax.lo < ax.hi)) throw Error("field grid axes must be increasing");
  }
  for (double v : g.a)
    if (!std::isfinite(v)) throw Error("field grid holds a non-finite value");
  for (double v : g.u)
    if (!std::isfinite(v)) throw Error("field grid holds a non-finite value");
}

// ---- Gaussian bump and its gradient ----

// g(z) = (2 pi sigma^2)^{-1/2} exp(-|z|^2 / sigma^2). Note the sigma^2 (not
// 2 sigma^2) in the exponent; total mass is sigma*sqrt(pi) / sqrt(2 pi
// sigma^2), not 1.
inline double gaussian_bump(const Vec& z, double sigma) {
  const double s2 = sigma * sigma;
  return std::exp(-norm2(z) / s2) /
         std::sqrt(2.0 * 3.14159265358979323846 * s2);
}

inline double gaussian_bump(double z, double sigma) {
  return gaussian_bump(Vec{z}, sigma);
}

// G(z) = grad g(z) = -2 z / (sigma^2 sqrt(2 pi sigma^2)) exp(-|z|^2/sigma^2).
inline Vec gaussian_bump_grad(const Vec& z, double sigma) {
  const double s2 = sigma * sigma;
  const double f = -2.0 / (s2 * std::sqrt(2.0 * 3.14159265358979323846 * s2)) *
                   std::exp(-norm2(z) / s2);
  return scaled(z, f);
}

// sup over z of |G(z)|; the maximum sits at |z| = sigma/sqrt(2).
inline double gaussian_grad_sup(double sigma) {
  const double s2 = sigma * sigma;
  return 2.0 / (s2 * std::sqrt(2.0 * 3.14159265358979323846 * s2)) *
         (sigma / std::sqrt(2.0)) * std::exp(-0.5);
}

// ---- Grid construction ----

inline FieldGrid make_potential_grid(
    std::vector<Axis> axes, double t0,
    const std::function<double(const Vec&)>& u0,
    const std::function<Vec(const Vec&)>& grad_u0, const PlasticRule& rule) {
  FieldGrid g;
  g.axes = std::move(axes);
  g.t = t0;
  const std::size_t n = g.n_nodes(), d = g.dim();
  g.u.resize(n);
  g.grad_u.resize(n * d);
  g.a.assign(n * d, 0.0);
  g.a_valid = rule.factor_defined_at(t0);
  const double f = g.a_valid ? rule.factor(t0) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec z = g.node_coord(i);
    g.u[i] = u0(z);
    const Vec gu = grad_u0(z);
    for (std::size_t k = 0; k < d; ++k) {
      g.grad_u[i * d + k] = gu[k];
      if (g.a_valid) g.a[i * d + k] = -f * gu[k];
    }
  }
  validate_grid(g);
  return g;
}

inline FieldGrid make_custom_grid(std::vector<Axis> axes, double t0,
                                  const std::function<Vec(const Vec&)>& a0) {
  FieldGrid g;
  g.axes = std::move(axes);
  g.t = t0;
  const std::size_t n = g.n_nodes(), d = g.dim();
  g.a.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec v = a0(g.node_coord(i));
    for (std::size_t k = 0; k < d; ++k) g.a[i * d + k] = v[k];
  }
  validate_grid(g);
  return g;
}

// ---- Field evolution ----

struct StepOptions {
  int threads = 1;
  // Evaluation order over nodes; results are identical for any permutation
  // because nodes are decoupled. Used by tests; leave null for natural order.
  const std::vector<std::size_t>* node_order = nullptr;
};

// Advances every node by one RK4 step of the field equation and returns the
// new snapshot. The stimulus is interpolated at the RK4 stage times.
inline FieldGrid step_field(const FieldGrid& grid, const PlasticRule& rule,
                            const StimulusPath& path, double dt,
                            const StepOptions& opts = {}) {
  if (!(dt > 0.0)) throw Error("step_field requires dt > 0");
  const std::size_t d = grid.dim();
  const std::size_t n = grid.n_nodes();
  if (rule.kind == PlasticRule::Kind::potential_linear && path.dim() != d)
    throw Error("potential rule requires stimulus dimension == grid dimension");

  FieldGrid out = grid;
  out.t = grid.t + dt;
  const double t_new = out.t;
  out.a_valid = rule.kind == PlasticRule::Kind::direct_custom ||
                rule.factor_defined_at(t_new);
  const double factor_new = out.a_valid && rule.kind == PlasticRule::Kind::potential_linear
                                ? rule.factor(t_new)
                                : 0.0;

  auto step_node = [&](std::size_t node) {
    const Vec z = grid.node_coord(node);
    if (rule.kind == PlasticRule::Kind::potential_linear) {
      // state = (u, grad u); both decay at rate k with Gaussian forcing
      Vec y(1 + d);
      y[0] = grid.u[node];
      for (std::size_t k = 0; k < d; ++k) y[1 + k] = grid.grad_u[node * d + k];
      auto rhs = [&](const Vec& s, double t) {
        const Vec eta = path.eval(t);
        Vec w(d);
        for (std::size_t k = 0; k < d; ++k) w[k] = z[k] - eta[k];
        Vec dy(1 + d);
        dy[0] = -rule.k * s[0] - gaussian_bump(w, rule.sigma);
        const Vec G = gaussian_bump_grad(w, rule.sigma);
        for (std::size_t k = 0; k < d; ++k) dy[1 + k] = -rule.k * s[1 + k] - G[k];
        return dy;
      };
      const Vec yn = rk4_step(rhs, y, grid.t, dt);
      if (!all_finite(yn))
        throw NumericError("field step produced a non-finite value at node " +
                               std::to_string(node),
                           t_new);
      out.u[node] = yn[0];
      for (std::size_t k = 0; k < d; ++k) {
        out.grad_u[node * d + k] = yn[1 + k];
        out.a[node * d + k] = out.a_valid ? -factor_new * yn[1 + k] : 0.0;
      }
    } else {
      Vec a = grid.a_at(node);
      auto rhs = [&](const Vec& s, double t) {
        Vec c = rule.custom_c(s, z, path.eval(t), t);
        if (c.size() != d)
          throw Error("custom rule returned wrong dimension");
        return c;
      };
      const Vec an = rk4_step(rhs, a, grid.t, dt);
      if (!all_finite(an))
        throw NumericError("field step produced a non-finite value at node " +
                               std::to_string(node),
                           t_new);
      for (std::size_t k = 0; k < d; ++k) out.a[node * d + k] = an[k];
    }
  };

  if (opts.node_order) {
    for (std::size_t idx : *opts.node_order) step_node(idx);
  } else {
    parallel_for(n, opts.threads, step_node);
  }
  return out;
}

// ---- Explicit solution and pullback limit of the potential gradient ----

// grad U(z, t) = grad_u0 e^{-k(t-t0)} - int_{t0}^{t} e^{-k(t-s)} G(z-eta(s)) ds,
// evaluated with one Simpson panel per stimulus cell.
inline Vec closed_form_grad_solution(const Vec& z, double t, double t0,
                                     const Vec& grad_u0, double k, double sigma,
                                     const StimulusPath& path) {
  const double span_tol = 1e-9 * std::max(1.0, std::fabs(path.t_min));
  if (t0 < path.t_min - span_tol || t > path.t_max + span_tol)
    throw DomainError("closed-form solution needs [t0, t] inside the stimulus domain",
                      t0, path.t_min, path.t_max);
  const std::size_t d = z.size();
  auto integrand = [&](double s) {
    const Vec eta = path.eval(s);
    Vec w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = z[i] - eta[i];
    return scaled(gaussian_bump_grad(w, sigma), std::exp(-k * (t - s)));
  };
  const Vec integral = simpson_on_cells(integrand, t0, t, path.t_min, path.dt, d);
  Vec out(d);
  const double decay = std::exp(-k * (t - t0));
  for (std::size_t i = 0; i < d; ++i) out[i] = grad_u0[i] * decay - integral[i];
  return out;
}

struct PullbackGrad {
  Vec value;
  double truncation_bound;  // e^{-k*horizon} * sup|G| / k
};

// grad Ubar(z, t) = -int_{-infty}^{t} e^{-k(t-s)} G(z-eta(s)) ds, truncated
// to [t - horizon, t]. The discarded tail is bounded by the reported value.
inline PullbackGrad pullback_limit_grad(const Vec& z, double t, double k,
                                        double sigma, const StimulusPath& path,
                                        double horizon) {
  if (!(k > 0.0))
    throw Error("pullback limit requires k > 0; no limit exists otherwise");
  const double t0 = t - horizon;
  const double span_tol = 1e-9 * std::max(1.0, std::fabs(path.t_min));
  if (t0 < path.t_min - span_tol)
    throw DomainError("pullback horizon exceeds the stimulus domain", t0,
                      path.t_min, path.t_max);
  PullbackGrad r;
  Vec zero(z.size(), 0.0);
  r.value = closed_form_grad_solution(z, t, t0, zero, k, sigma, path);
  r.truncation_bound = std::exp(-k * horizon) * gaussian_grad_sup(sigma) / k;
  return r;
}

// ---- Spatial evaluation and differentiation ----

// Multilinear interpolation of the velocity field; exact at nodes and for
// globally affine fields. Throws outside the grid box.
inline Vec eval_field(const FieldGrid& g, const Vec& x) {
  const std::size_t d = g.dim();
  if (!g.a_valid)
    throw Error("field values are undefined at t=" + fmt17(g.t) +
                " (1/t factor below its floor)");
  std::vector<std::size_t> base(d);
  Vec w(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Axis& ax = g.axes[k];
    const double tol = 1e-9 * std::max(1.0, std::fabs(ax.hi - ax.lo));
    if (x[k] < ax.lo - tol || x[k] > ax.hi + tol)
      throw DomainError("field evaluation outside the grid box (axis " +
                            std::to_string(k) + ")",
                        x[k], ax.lo, ax.hi);
    double u = (x[k] - ax.lo) / ax.h();
    if (u < 0.0) u = 0.0;
    if (u > static_cast<double>(ax.n - 1)) u = static_cast<double>(ax.n - 1);
    std::size_t i = static_cast<std::size_t>(std::floor(u));
    if (i > ax.n - 2) i = ax.n - 2;
    base[k] = i;
    w[k] = u - static_cast<double>(i);
  }
  Vec out(d, 0.0);
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t node = 0, strideAcc = 1;
    for (std::size_t k = 0; k < d; ++k) {
      const bool hi = (c >> k) & 1u;
      weight *= hi ? w[k] : 1.0 - w[k];
      node += (base[k] + (hi ? 1 : 0)) * strideAcc;
      strideAcc *= g.axes[k].n;
    }
    if (weight == 0.0) continue;
    for (std::size_t k = 0; k < d; ++k) out[k] += weight * g.a[node * d + k];
  }
  return out;
}

// Per-node Jacobian of the velocity field, d a_i / d z_j: central differences
// in the interior, one-sided second order at the boundaries. Row-major d x d
// blocks per node. Needs >= 3 nodes per axis.
inline std::vector<double> field_gradient(const FieldGrid& g) {
  const std::size_t d = g.dim();
  for (const auto& ax : g.axes)
    if (ax.n < 3) throw Error("field gradient needs at least 3 nodes per axis");
  const std::size_t n = g.n_nodes();
  std::vector<double> jac(n * d * d);
  std::vector<std::size_t> strides(d);
  std::size_t acc = 1;
  for (std::size_t k = 0; k < d; ++k) {
    strides[k] = acc;
    acc *= g.axes[k].n;
  }
  for (std::size_t node = 0; node < n; ++node) {
    std::size_t rem = node;
    std::vector<std::size_t> idx(d);
    for (std::size_t k = 0; k < d; ++k) {
      idx[k] = rem % g.axes[k].n;
      rem /= g.axes[k].n;
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double h = g.axes[j].h();
      const std::size_t s = strides[j];
      const std::size_t nj = g.axes[j].n;
      for (std::size_t i = 0; i < d; ++i) {
        double deriv;
        const auto comp = [&](std::size_t nd) { return g.a[nd * d + i]; };
        if (idx[j] == 0) {
          deriv = (-3.0 * comp(node) + 4.0 * comp(node + s) - comp(node + 2 * s)) /
                  (2.0 * h);
        } else if (idx[j] == nj - 1) {
          deriv = (3.0 * comp(node) - 4.0 * comp(node - s) + comp(node - 2 * s)) /
                  (2.0 * h);
        } else {
          deriv = (comp(node + s) - comp(node - s)) / (2.0 * h);
        }
        jac[(node * d + i) * d + j] = deriv;
      }
    }
  }
  return jac;
}

// Worst disagreement between the stored potential gradient and finite
// differences of the stored potential; O(h^2) for smooth potentials.
inline double potential_consistency_defect(const FieldGrid& g) {
  if (!g.has_potential()) throw Error("grid carries no potential values");
  const std::size_t d = g.dim();
  std::vector<std::size_t> strides(d);
  std::size_t acc = 1;
  for (std::size_t k = 0; k < d; ++k) {
    strides[k] = acc;
    acc *= g.axes[k].n;
  }
  double worst = 0.0;
  const std::size_t n = g.n_nodes();
  for (std::size_t node = 0; node < n; ++node) {
    std::size_t rem = node;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t ij = rem % g.axes[j].n;
      rem /= g.axes[j].n;
      const double h = g.axes[j].h();
      const std::size_t s = strides[j];
      double fd;
      if (ij == 0)
        fd = (-3.0 * g.u[node] + 4.0 * g.u[node + s] - g.u[node + 2 * s]) /
             (2.0 * h);
      else if (ij == g.axes[j].n - 1)
        fd = (3.0 * g.u[node] - 4.0 * g.u[node - s] + g.u[node - 2 * s]) /
             (2.0 * h);
      else
        fd = (g.u[node + s] - g.u[node - s]) / (2.0 * h);
      worst = std::max(worst, std::fabs(fd - g.grad_u[node * d + j]));
    }
  }
  return worst;
}

// ---- Snapshot file format: JSON header line + CSV body ----

inline std::string field_to_snapshot_text(const FieldGrid& g,
                                          const Json& rule_params) {
  Json header;
  header["dim"] = g.dim();
  Json axes = Json::array();
  for (const auto& ax : g.axes) axes.push_back({ax.lo, ax.hi, ax.n});
  header["axes"] = axes;
  header["t"] = g.t;
  header["rule"] = rule_params;
  header["has_potential"] = g.has_potential();
  std::string out = header.dump() + "\n";
  const std::size_t d = g.dim();
  for (std::size_t k = 1; k <= d; ++k) {
    if (k > 1) out += ",";
    out += "z_" + std::to_string(k);
  }
  for (std::size_t k = 1; k <= d; ++k) out += ",a_" + std::to_string(k);
  if (g.has_potential()) out += ",u";
  out += "\n";
  const std::size_t n = g.n_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec z = g.node_coord(i);
    std::string row;
    for (std::size_t k = 0; k < d; ++k) row += (k > 0 ? "," : "") + fmt17(z[k]);
    for (std::size_t k = 0; k < d; ++k) row += "," + fmt17(g.a[i * d + k]);
    if (g.has_potential()) row += "," + fmt17(g.u[i]);
    out += row + "\n";
  }
  return out;
}

// Reads a snapshot written by field_to_snapshot_text. When the header names a
// potential rule with a defined factor at t, grad_u is reconstructed from a.
inline FieldGrid field_from_snapshot_text(const std::string& text) {
  const std::size_t nl = text.find('\n');
  if (nl == std::string::npos) throw Error("snapshot file is truncated");
  Json header = Json::parse(text.substr(0, nl));
  FieldGrid g;
  for (const auto& ax : header.at("axes"))
    g.axes.push_back(Axis{ax.at(0).get<double>(), ax.at(1).get<double>(),
                          ax.at(2).get<std::size_t>()});
  g.t = header.at("t").get<double>();
  const bool has_u = header.at("has_potential").get<bool>();
  const std::size_t d = g.dim();
  const std::size_t n = g.n_nodes();
  g.a.assign(n * d, 0.0);
  if (has_u) {
    g.u.assign(n, 0.0);
    g.grad_u.assign(n * d, 0.0);
  }
  std::size_t pos = text.find('\n', nl + 1);  // skip CSV header
  if (pos == std::string::npos) throw Error("snapshot file is truncated");
  ++pos;
  std::size_t row = 0;
  while (pos < text.size() && row < n) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto cells = split_csv_line(text.substr(pos, end - pos));
    const std::size_t expect = 2 * d + (has_u ? 1 : 0);
    if (cells.size() != expect)
      throw Error("snapshot row " + std::to_string(row) + " has wrong column count");
    for (std::size_t k = 0; k < d; ++k)
      g.a[row * d + k] = parse_double(cells[d + k]);
    if (has_u) g.u[row] = parse_double(cells[2 * d]);
    pos = end + 1;
    ++row;
  }
  if (row != n) throw Error("snapshot file has too few rows");
  if (has_u && header.contains("rule") && header["rule"].contains("factor")) {
    const double f = header["rule"]["factor"].get<double>();
    if (f != 0.0)
      for (std::size_t i = 0; i < n * d; ++i) g.grad_u[i] = -g.a[i] / f;
  }
  validate_grid(g);
  return g;
}

}  // namespace plastica
