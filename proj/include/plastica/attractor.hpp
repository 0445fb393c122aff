#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "plastica/core.hpp"
#include "plastica/errors.hpp"
#include "plastica/io.hpp"
#include "plastica/kdtree.hpp"
#include "plastica/sampling.hpp"
#include "plastica/trajectory.hpp"

namespace plastica {

// Finite representation of a compact set: a point cloud plus the minimal
// cover by eps-grid boxes containing it.
struct SetEstimate {
  std::vector<Vec> points;
  double box_size = 0.0;
  std::vector<std::vector<std::int64_t>> boxes;  // sorted, unique indices
  std::optional<double> t;

  static SetEstimate from_points(std::vector<Vec> pts, double eps,
                                 std::optional<double> t = {}) {
    if (!(eps > 0.0)) throw Error("set estimate needs eps > 0");
    SetEstimate e;
    e.box_size = eps;
    e.t = t;
    std::set<std::vector<std::int64_t>> cover;
    for (const Vec& p : pts) {
      std::vector<std::int64_t> idx(p.size());
      for (std::size_t k = 0; k < p.size(); ++k)
        idx[k] = static_cast<std::int64_t>(std::floor(p[k] / eps));
      cover.insert(std::move(idx));
    }
    e.boxes.assign(cover.begin(), cover.end());
    e.points = std::move(pts);
    return e;
  }

  Json to_json() const {
    Json j;
    if (t)
      j["t"] = *t;
    else
      j["t"] = nullptr;
    j["eps"] = box_size;
    Json boxes_j = Json::array();
    for (const auto& b : boxes) boxes_j.push_back(b);
    j["boxes"] = boxes_j;
    Json pts_j = Json::array();
    for (const auto& p : points) pts_j.push_back(p);
    j["points"] = pts_j;
    return j;
  }

  static SetEstimate from_json(const Json& j) {
    SetEstimate e;
    if (!j.at("t").is_null()) e.t = j.at("t").get<double>();
    e.box_size = j.at("eps").get<double>();
    for (const auto& b : j.at("boxes"))
      e.boxes.push_back(b.get<std::vector<std::int64_t>>());
    for (const auto& p : j.at("points")) e.points.push_back(p.get<Vec>());
    return e;
  }
};

// ---- Hausdorff distances ----

// sup over a in `from` of the distance to the nearest point of `to`.
inline double directed_hausdorff(const std::vector<Vec>& from,
                                 const std::vector<Vec>& to) {
  if (from.empty() || to.empty())
    throw Error("Hausdorff distance of an empty set");
  const KdTree tree(to);
  double worst2 = 0.0;
  for (const Vec& p : from)
    worst2 = std::max(worst2, tree.nearest_dist2(p));
  return std::sqrt(worst2);
}

inline double hausdorff_distance(const std::vector<Vec>& a,
                                 const std::vector<Vec>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

// ---- Cloud evolution ----

namespace detail {

// Evolves one point with RK4, checking a ball-invariance monitor after every
// step. Returns the final state only.
template <class Monitor>
Vec evolve_point(const RhsSource& src, Vec x, double t0, double t1, double dt,
                 Monitor&& monitor) {
  auto rhs = [&src](const Vec& y, double t) { return src.eval(y, t); };
  double t = t0;
  std::size_t i = 0;
  while (t < t1 - 1e-12 * std::max(1.0, std::fabs(t1))) {
    double tn = t0 + static_cast<double>(i + 1) * dt;
    double step = dt;
    if (tn > t1) {
      tn = t1;
      step = t1 - t;
    }
    x = rk4_step(rhs, x, t, step);
    if (!all_finite(x))
      throw NumericError("cloud point became non-finite", tn);
    monitor(x, tn);
    t = tn;
    ++i;
  }
  return x;
}

inline void check_inside_ball(const Vec& x, double t, double radius,
                              double margin) {
  if (norm(x) > radius + margin)
    throw InvarianceError(
        "cloud point left the declared positively invariant ball", x, t);
}

}  // namespace detail

struct CloudOptions {
  std::size_t cloud_n = 512;
  double eps = 0.02;       // box-cover resolution
  double dt = 0.01;        // integrator step
  double conv_eps = 0.0;   // convergence gap threshold; 0 -> 2 * eps
  double invariance_margin = -1.0;  // escape slack; <0 -> 1e-6 * radius
  double sample_cadence = 0.05;     // forward sets: state collection period
  int threads = 1;
};

inline double resolved_margin(const CloudOptions& o, double radius) {
  return o.invariance_margin >= 0.0 ? o.invariance_margin
                                    : 1e-6 * std::max(1.0, radius);
}

// ---- Pullback attractor estimate ----

// One estimate per starting time, arrivals of the absorbing-ball cloud at
// target_t. Estimates for earlier starts nest inside later ones, so the
// sequence is Cauchy in Hausdorff distance; convergence is declared after
// two consecutive gaps at or below conv_eps (a heuristic, reported as such).
struct PullbackSweep {
  double target_t = 0.0;
  std::vector<double> t0_sequence;
  std::vector<SetEstimate> estimates;
  std::vector<double> hausdorff_gaps;   // gap[i] between estimate i-1 and i
  std::vector<double> nesting_defects;  // directed dist of estimate i into i-1
  bool converged = false;
  std::size_t converged_index = 0;
};

inline PullbackSweep pullback_attractor_estimate(
    const RhsSource& src, double b_radius, double target_t,
    std::vector<double> t0_sequence, const CloudOptions& opts = {}) {
  if (t0_sequence.empty()) throw Error("pullback sweep needs starting times");
  for (std::size_t i = 0; i < t0_sequence.size(); ++i) {
    if (t0_sequence[i] > target_t)
      throw Error("pullback starting times must be <= target_t");
    if (i > 0 && !(t0_sequence[i] < t0_sequence[i - 1]))
      throw Error("pullback starting times must be strictly decreasing");
  }
  const double margin = resolved_margin(opts, b_radius);
  const double conv = opts.conv_eps > 0.0 ? opts.conv_eps : 2.0 * opts.eps;
  if (src.dim == 0) throw Error("rhs source has no declared dimension");
  const std::size_t d = src.dim;

  PullbackSweep sweep;
  sweep.target_t = target_t;
  sweep.t0_sequence = t0_sequence;
  const std::vector<Vec> cloud = ball_cloud(d, b_radius, opts.cloud_n);

  std::size_t consecutive = 0;
  for (std::size_t s = 0; s < t0_sequence.size(); ++s) {
    const double t0 = t0_sequence[s];
    std::vector<Vec> arrivals(cloud.size());
    std::exception_ptr failure;
    std::mutex fail_mx;
    parallel_for(cloud.size(), opts.threads, [&](std::size_t i) {
      try {
        arrivals[i] = detail::evolve_point(
            src, cloud[i], t0, target_t, opts.dt, [&](const Vec& x, double t) {
              detail::check_inside_ball(x, t, b_radius, margin);
            });
      } catch (...) {
        std::lock_guard<std::mutex> lk(fail_mx);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);

    sweep.estimates.push_back(
        SetEstimate::from_points(std::move(arrivals), opts.eps, target_t));
    if (s == 0) {
      sweep.hausdorff_gaps.push_back(std::numeric_limits<double>::quiet_NaN());
      sweep.nesting_defects.push_back(0.0);
    } else {
      const double gap = hausdorff_distance(sweep.estimates[s - 1].points,
                                            sweep.estimates[s].points);
      sweep.hausdorff_gaps.push_back(gap);
      sweep.nesting_defects.push_back(directed_hausdorff(
          sweep.estimates[s].points, sweep.estimates[s - 1].points));
      if (gap <= conv) {
        if (++consecutive >= 2 && !sweep.converged) {
          sweep.converged = true;
          sweep.converged_index = s;
        }
      } else {
        consecutive = 0;
      }
    }
  }
  return sweep;
}

// ---- Forward limit sets ----

// States of the evolved cloud collected at every sample_cadence within
// [tau_burn, t_end], box-covered at eps.
inline SetEstimate forward_limit_set_estimate(const RhsSource& src,
                                              double b_radius, double t0,
                                              double tau_burn, double t_end,
                                              const CloudOptions& opts = {}) {
  if (!(t0 < tau_burn && tau_burn < t_end))
    throw Error("forward limit set needs t0 < tau_burn < t_end");
  const double margin = resolved_margin(opts, b_radius);
  if (src.dim == 0) throw Error("rhs source has no declared dimension");
  const std::size_t d = src.dim;
  const std::vector<Vec> cloud = ball_cloud(d, b_radius, opts.cloud_n);

  std::vector<std::vector<Vec>> collected(cloud.size());
  std::exception_ptr failure;
  std::mutex fail_mx;
  parallel_for(cloud.size(), opts.threads, [&](std::size_t i) {
    try {
      double next_sample = tau_burn;
      detail::evolve_point(src, cloud[i], t0, t_end, opts.dt,
                           [&](const Vec& x, double t) {
                             detail::check_inside_ball(x, t, b_radius, margin);
                             if (t + 1e-12 >= next_sample) {
                               collected[i].push_back(x);
                               while (next_sample <= t + 1e-12)
                                 next_sample += opts.sample_cadence;
                             }
                           });
    } catch (...) {
      std::lock_guard<std::mutex> lk(fail_mx);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);

  std::vector<Vec> all;
  for (auto& c : collected)
    for (auto& p : c) all.push_back(std::move(p));
  return SetEstimate::from_points(std::move(all), opts.eps, t0);
}

// ---- Forward attracting set ----

struct ForwardAttractingResult {
  SetEstimate omega_star;              // union over starting times, t absent
  std::vector<SetEstimate> per_t0;     // one limit-set estimate per t0
  std::vector<double> monotonicity_defects;  // per consecutive t0 pair
};

// Union of the per-t0 forward limit sets. tau_burn for each t0 is
// t0 + burn_offset. The limit sets grow with t0; the defects report how far
// each estimate falls outside its successor (0 means nested as predicted).
inline ForwardAttractingResult forward_attracting_set(
    const RhsSource& src, double b_radius, const std::vector<double>& t0_list,
    double burn_offset, double t_end, const CloudOptions& opts = {}) {
  if (t0_list.empty()) throw Error("forward attracting set needs t0 values");
  for (std::size_t i = 1; i < t0_list.size(); ++i)
    if (!(t0_list[i] > t0_list[i - 1]))
      throw Error("t0 list must be strictly increasing");
  ForwardAttractingResult r;
  for (double t0 : t0_list)
    r.per_t0.push_back(forward_limit_set_estimate(src, b_radius, t0,
                                                  t0 + burn_offset, t_end, opts));
  for (std::size_t i = 0; i + 1 < r.per_t0.size(); ++i)
    r.monotonicity_defects.push_back(directed_hausdorff(
        r.per_t0[i].points, r.per_t0[i + 1].points));
  std::vector<Vec> all;
  for (const auto& e : r.per_t0)
    for (const auto& p : e.points) all.push_back(p);
  r.omega_star = SetEstimate::from_points(std::move(all), opts.eps);
  r.omega_star.t.reset();
  return r;
}

// ---- Forward attraction check ----

struct AttractionCheckReport {
  std::vector<double> times;
  // directed distance from each evolved test set to the target set
  std::vector<std::vector<double>> directed_dist;
  std::vector<bool> attracted;  // distance fell and stayed below eps
  double eps = 0.0;
};

inline AttractionCheckReport forward_attraction_check(
    const RhsSource& src, const SetEstimate& target,
    const std::vector<std::vector<Vec>>& test_sets, double t0, double t_end,
    const CloudOptions& opts = {}) {
  if (target.points.empty()) throw Error("attraction target has no points");
  AttractionCheckReport rep;
  rep.eps = opts.eps;
  for (double t = t0 + opts.sample_cadence; t <= t_end + 1e-12;
       t += opts.sample_cadence)
    rep.times.push_back(t);
  const KdTree tree(target.points);
  for (const auto& set : test_sets) {
    std::vector<std::vector<Vec>> snapshots(rep.times.size());
    std::vector<std::vector<Vec>> per_point(set.size());
    std::exception_ptr failure;
    std::mutex fail_mx;
    parallel_for(set.size(), opts.threads, [&](std::size_t i) {
      try {
        std::size_t next = 0;
        per_point[i].resize(rep.times.size());
        detail::evolve_point(src, set[i], t0, t_end, opts.dt,
                             [&](const Vec& x, double t) {
                               while (next < rep.times.size() &&
                                      t + 1e-12 >= rep.times[next]) {
                                 per_point[i][next] = x;
                                 ++next;
                               }
                             });
        while (next < rep.times.size()) per_point[i][next++] = Vec{};
      } catch (...) {
        std::lock_guard<std::mutex> lk(fail_mx);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);

    std::vector<double> dists(rep.times.size(), 0.0);
    for (std::size_t s = 0; s < rep.times.size(); ++s) {
      double worst2 = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i)
        if (!per_point[i][s].empty())
          worst2 = std::max(worst2, tree.nearest_dist2(per_point[i][s]));
      dists[s] = std::sqrt(worst2);
    }
    // attracted iff the tail stays below eps
    bool attr = !dists.empty();
    std::size_t tail = dists.size() - std::min<std::size_t>(dists.size(), 5);
    for (std::size_t s = tail; s < dists.size(); ++s)
      if (dists[s] > opts.eps) attr = false;
    rep.directed_dist.push_back(std::move(dists));
    rep.attracted.push_back(attr);
  }
  return rep;
}

// Sweep report CSV: `t0,n_points,n_boxes,hausdorff_gap`.
inline std::string sweep_to_csv(const PullbackSweep& sweep) {
  std::string out = "t0,n_points,n_boxes,hausdorff_gap\n";
  for (std::size_t i = 0; i < sweep.t0_sequence.size(); ++i) {
    out += fmt17(sweep.t0_sequence[i]);
    out += "," + std::to_string(sweep.estimates[i].points.size());
    out += "," + std::to_string(sweep.estimates[i].boxes.size());
    out += "," + fmt17(sweep.hausdorff_gaps[i]);
    out += "\n";
  }
  return out;
}

}  // namespace plastica
