#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/field.hpp"
#include "plastica/rk4.hpp"

namespace plastica {

// Time series of the observable state.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::string provenance;  // scenario id + seed tag, empty for library calls
};

// Right-hand side for the observable equation dx/dt = a(x, t).
//
// field_snapshots evaluates by multilinear interpolation in space and linear
// blending between the two bracketing snapshots in time. Snapshots that carry
// a potential gradient blend grad u and apply the rule's time factor at the
// evaluation time, which keeps a 1/t factor exact between snapshots.
// Times before the first snapshot use the first snapshot unchanged
// (frozen initial field as the artificial past); a single snapshot acts as a
// static field for all times.
struct RhsSource {
  enum class Kind { analytic, switching, field_snapshots };
  Kind kind = Kind::analytic;
  std::size_t dim = 0;  // state dimension

  std::function<Vec(const Vec&, double)> f;          // analytic
  std::function<Vec(const Vec&, double)> pre, post;  // switching
  double t_switch = 0.0;

  std::vector<FieldGrid> snapshots;  // strictly increasing t
  bool frozen_before_first = true;
  bool use_potential_factor = false;
  TimeFactor snapshot_factor = TimeFactor::constant;
  double factor_gamma = 1.0;
  double factor_t_floor = 1.0;

  static RhsSource analytic_source(std::function<Vec(const Vec&, double)> fn,
                                   std::size_t dim) {
    RhsSource s;
    s.kind = Kind::analytic;
    s.f = std::move(fn);
    s.dim = dim;
    return s;
  }

  static RhsSource switching_source(std::function<Vec(const Vec&, double)> pre,
                                    std::function<Vec(const Vec&, double)> post,
                                    double t_switch, std::size_t dim) {
    RhsSource s;
    s.kind = Kind::switching;
    s.pre = std::move(pre);
    s.post = std::move(post);
    s.t_switch = t_switch;
    s.dim = dim;
    return s;
  }

  // rule may be null for plain grids; for potential grids it supplies the
  // time factor applied at evaluation time.
  static RhsSource snapshot_source(std::vector<FieldGrid> snaps,
                                   const PlasticRule* rule = nullptr) {
    RhsSource s;
    s.kind = Kind::field_snapshots;
    if (snaps.empty()) throw Error("snapshot source needs at least one snapshot");
    for (std::size_t i = 1; i < snaps.size(); ++i) {
      if (!(snaps[i].t > snaps[i - 1].t))
        throw Error("snapshots must be strictly increasing in time");
      if (snaps[i].axes.size() != snaps[0].axes.size())
        throw Error("snapshots must share one grid");
      for (std::size_t k = 0; k < snaps[0].axes.size(); ++k) {
        const Axis &a = snaps[i].axes[k], &b = snaps[0].axes[k];
        if (a.lo != b.lo || a.hi != b.hi || a.n != b.n)
          throw Error("snapshots must share one grid");
      }
    }
    if (rule && rule->kind == PlasticRule::Kind::potential_linear) {
      if (snaps[0].grad_u.empty())
        throw Error("potential-factor source needs snapshots with grad_u");
      s.use_potential_factor = true;
      s.snapshot_factor = rule->time_factor;
      s.factor_gamma = rule->gamma;
      s.factor_t_floor = rule->t_floor;
    }
    s.dim = snaps[0].dim();
    s.snapshots = std::move(snaps);
    return s;
  }

  double factor_at(double t) const {
    if (snapshot_factor == TimeFactor::constant) return factor_gamma;
    if (t < factor_t_floor)
      throw DomainError("1/t field factor requested below its floor", t,
                        factor_t_floor, std::numeric_limits<double>::infinity());
    return 1.0 / t;
  }

  Vec eval(const Vec& x, double t) const {
    switch (kind) {
      case Kind::analytic:
        return f(x, t);
      case Kind::switching:
        return t <= t_switch ? pre(x, t) : post(x, t);
      case Kind::field_snapshots: {
        const auto& sn = snapshots;
        if (sn.size() == 1)  // a single snapshot is a static field
          return eval_blend(sn.front(), sn.front(), 0.0, x, t);
        if (t <= sn.front().t) {
          if (!frozen_before_first && t < sn.front().t - 1e-12)
            throw DomainError("time before first snapshot", t, sn.front().t,
                              sn.back().t);
          return eval_blend(sn.front(), sn.front(), 0.0, x, t);
        }
        const double span_tol =
            1e-9 * std::max(1.0, std::fabs(sn.back().t));
        if (t > sn.back().t + span_tol)
          throw DomainError("time after last snapshot", t, sn.front().t,
                            sn.back().t);
        if (t >= sn.back().t) return eval_blend(sn.back(), sn.back(), 0.0, x, t);
        // bracketing pair by binary search on snapshot times
        std::size_t lo = 0, hi = sn.size() - 1;
        while (hi - lo > 1) {
          const std::size_t mid = (lo + hi) / 2;
          if (sn[mid].t <= t)
            lo = mid;
          else
            hi = mid;
        }
        const double th = (t - sn[lo].t) / (sn[hi].t - sn[lo].t);
        return eval_blend(sn[lo], sn[hi], th, x, t);
      }
    }
    throw Error("invalid rhs source");
  }

 private:
  Vec eval_blend(const FieldGrid& g0, const FieldGrid& g1, double th,
                 const Vec& x, double t) const {
    if (!use_potential_factor) {
      const Vec a0 = eval_field(g0, x);
      if (th == 0.0) return a0;
      const Vec a1 = eval_field(g1, x);
      Vec out(a0.size());
      for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (1.0 - th) * a0[k] + th * a1[k];
      return out;
    }
    const Vec gu0 = eval_grad_u(g0, x);
    Vec gu = gu0;
    if (th != 0.0) {
      const Vec gu1 = eval_grad_u(g1, x);
      for (std::size_t k = 0; k < gu.size(); ++k)
        gu[k] = (1.0 - th) * gu0[k] + th * gu1[k];
    }
    return scaled(gu, -factor_at(t));
  }

  // multilinear interpolation of grad_u (same kernel as eval_field)
  static Vec eval_grad_u(const FieldGrid& g, const Vec& x) {
    FieldGrid view;
    view.axes = g.axes;
    view.t = g.t;
    view.a = g.grad_u;
    view.a_valid = true;
    return eval_field(view, x);
  }
};

// Hard-coded switching right-hand side: linear contraction up to the switch
// time, componentwise pitchfork x(1 - x^2) afterwards.
inline Vec switching_rhs(const Vec& x, double t, double t0) {
  Vec out(x.size());
  if (t <= t0) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = -x[k];
  } else {
    for (std::size_t k = 0; k < x.size(); ++k)
      out[k] = x[k] * (1.0 - x[k] * x[k]);
  }
  return out;
}

// Thrown when a trajectory reaches the edge of the field's grid box; carries
// the exit state and whatever was integrated up to that point.
class TrajectoryExitError : public Error {
 public:
  TrajectoryExitError(double t, Vec state, Trajectory partial)
      : Error("trajectory left the grid box at t=" + std::to_string(t)),
        t(t),
        state(std::move(state)),
        partial(std::move(partial)) {}
  double t;
  Vec state;
  Trajectory partial;
};

// RK4 with fixed step dt from t0 to t1, recording every step. Step times are
// computed as t0 + i*dt (never accumulated), so restarting at a recorded grid
// time reproduces the remaining steps.
inline Trajectory integrate_trajectory(const RhsSource& src, const Vec& x0,
                                       double t0, double t1, double dt) {
  if (!(t0 < t1)) throw Error("integrate_trajectory requires t0 < t1");
  if (!(dt > 0.0)) throw Error("integrate_trajectory requires dt > 0");
  Trajectory traj;
  auto rhs = [&src](const Vec& x, double t) { return src.eval(x, t); };
  Vec x = x0;
  double t = t0;
  traj.times.push_back(t);
  traj.states.push_back(x);
  std::size_t i = 0;
  while (t < t1 - 1e-12 * std::max(1.0, std::fabs(t1))) {
    double tn = t0 + static_cast<double>(i + 1) * dt;
    double step = dt;
    if (tn > t1) {
      tn = t1;
      step = t1 - t;
    }
    Vec xn;
    try {
      xn = rk4_step(rhs, x, t, step);
    } catch (const DomainError&) {
      throw TrajectoryExitError(t, x, std::move(traj));
    }
    if (!all_finite(xn))
      throw NumericError("trajectory state became non-finite", tn);
    x = std::move(xn);
    t = tn;
    ++i;
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

// |a(x(t_i), t_i)| for every recorded sample.
inline std::vector<double> velocity_magnitude_series(const Trajectory& traj,
                                                     const RhsSource& src) {
  std::vector<double> out;
  out.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    out.push_back(norm(src.eval(traj.states[i], traj.times[i])));
  return out;
}

// ---- Trajectory CSV: `t,x_1,...,x_d` ----

inline std::string trajectory_to_csv(const Trajectory& traj) {
  const std::size_t d = traj.states.empty() ? 0 : traj.states[0].size();
  std::string out = "t";
  for (std::size_t k = 1; k <= d; ++k) out += ",x_" + std::to_string(k);
  out += "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += fmt17(traj.times[i]);
    for (double v : traj.states[i]) out += "," + fmt17(v);
    out += "\n";
  }
  return out;
}

}  // namespace plastica
