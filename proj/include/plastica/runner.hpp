#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plastica/scenario.hpp"

namespace plastica {

struct RunOptions {
  std::string out_dir;  // overrides scenario output.dir when non-empty
  int threads = 1;
  std::optional<std::uint64_t> seed_override;
};

struct RunResult {
  std::string out_dir;
  std::vector<std::string> files;  // relative paths, manifest excluded
  std::optional<bool> checks_passed;
};

namespace detail_run {

namespace fs = std::filesystem;

// ---- formula catalogue ----

inline std::function<Vec(const Vec&, double)> formula_rhs(const std::string& name) {
  if (name == "linear_decay")
    return [](const Vec& x, double) { return scaled(x, -1.0); };
  if (name == "cubic_pitchfork")
    return [](const Vec& x, double) {
      Vec out(x.size());
      for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = x[k] * (1.0 - x[k] * x[k]);
      return out;
    };
  if (name == "decay_plus_sin")
    return [](const Vec& x, double t) {
      Vec out(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = -x[k] + std::sin(t);
      return out;
    };
  if (name == "zero")
    return [](const Vec& x, double) { return Vec(x.size(), 0.0); };
  throw ScenarioError("unknown system formula '" + name + "'");
}

inline std::function<std::vector<double>(const Vec&, double)> formula_grad(
    const std::string& name, std::size_t d) {
  if (name == "linear_decay" || name == "decay_plus_sin")
    return [d](const Vec&, double) {
      std::vector<double> j(d * d, 0.0);
      for (std::size_t i = 0; i < d; ++i) j[i * d + i] = -1.0;
      return j;
    };
  if (name == "cubic_pitchfork")
    return [d](const Vec& x, double) {
      std::vector<double> j(d * d, 0.0);
      for (std::size_t i = 0; i < d; ++i) j[i * d + i] = 1.0 - 3.0 * x[i] * x[i];
      return j;
    };
  if (name == "zero")
    return [d](const Vec&, double) { return std::vector<double>(d * d, 0.0); };
  throw ScenarioError("unknown system formula '" + name + "'");
}

// ---- model construction ----

inline PlasticRule make_rule(const Scenario& s) {
  PlasticRule r;
  if (s.rule.kind == "potential-linear") {
    r.kind = PlasticRule::Kind::potential_linear;
    r.k = s.rule.k;
    r.sigma = s.rule.sigma;
    r.time_factor = s.rule.time_factor == "one-over-t" ? TimeFactor::one_over_t
                                                       : TimeFactor::constant;
    r.gamma = s.rule.gamma;
    r.t_floor = s.rule.t_floor;
  } else if (s.rule.kind == "radial") {
    r.kind = PlasticRule::Kind::direct_custom;
    const double coeff = s.rule.coeff;
    r.custom_c = [coeff](const Vec&, const Vec& z, const Vec&, double) {
      return scaled(z, coeff);
    };
  } else {
    throw ScenarioError("scenario has no usable rule");
  }
  return r;
}

inline StimulusPath build_stimulus(const Scenario& s, double t_max) {
  const Interp interp = interp_from_string(s.stimulus.interpolation);
  const std::size_t m = s.system.kind == "plastic" ? s.dimension : 1;
  if (s.stimulus.kind == "sde") {
    if (m != 1)
      throw ScenarioError("the SDE stimulus is scalar; potential rules need dimension 1");
    SdeSpec spec;
    spec.drift = double_well_drift;
    spec.diffusion = s.stimulus.diffusion;
    spec.eta0 = s.stimulus.eta0;
    spec.guard = s.stimulus.guard;
    return simulate_sde_path(spec, s.time.t_min, t_max, s.stimulus.dt,
                             s.stimulus.seed);
  }
  // formula
  const double A = s.stimulus.amplitude, w = s.stimulus.omega,
               ph = s.stimulus.phase, v0 = s.stimulus.value;
  std::function<double(double)> f;
  if (s.stimulus.formula == "zero") f = [](double) { return 0.0; };
  if (s.stimulus.formula == "constant") f = [v0](double) { return v0; };
  if (s.stimulus.formula == "sin")
    f = [A, w, ph](double t) { return A * std::sin(w * t + ph); };
  return make_deterministic_path(
      std::function<Vec(double)>([f, m](double t) { return Vec(m, f(t)); }),
      s.time.t_min, t_max, s.stimulus.dt, interp);
}

inline FieldGrid build_initial_grid(const Scenario& s, const PlasticRule& rule) {
  const auto& f = s.initial_field;
  if (rule.kind == PlasticRule::Kind::potential_linear) {
    if (f.kind == "zero")
      return make_potential_grid(
          s.grid_axes, s.time.t_start, [](const Vec&) { return 0.0; },
          [](const Vec& z) { return Vec(z.size(), 0.0); }, rule);
    if (f.kind == "gaussian-well") {
      const double A = f.amplitude, w = f.width;
      const Vec c = f.center;
      return make_potential_grid(
          s.grid_axes, s.time.t_start,
          [A, w, c](const Vec& z) {
            Vec r(z.size());
            for (std::size_t k = 0; k < z.size(); ++k) r[k] = z[k] - c[k];
            return -A * gaussian_bump(r, w);
          },
          [A, w, c](const Vec& z) {
            Vec r(z.size());
            for (std::size_t k = 0; k < z.size(); ++k) r[k] = z[k] - c[k];
            return scaled(gaussian_bump_grad(r, w), -A);
          },
          rule);
    }
    if (f.kind == "file") {
      FieldGrid g = field_from_snapshot_text(read_text_file(f.path));
      if (g.dim() != s.dimension)
        throw ScenarioError("initial field file has the wrong dimension");
      if (!g.has_potential())
        throw ScenarioError("initial field file carries no potential data");
      g.t = s.time.t_start;
      return g;
    }
    throw ScenarioError("initial_field.kind '" + f.kind +
                        "' is not valid for potential rules");
  }
  // custom rules evolve a directly
  if (f.kind == "zero")
    return make_custom_grid(s.grid_axes, s.time.t_start,
                            [](const Vec& z) { return Vec(z.size(), 0.0); });
  if (f.kind == "linear") {
    const double slope = f.slope;
    return make_custom_grid(s.grid_axes, s.time.t_start,
                            [slope](const Vec& z) { return scaled(z, slope); });
  }
  if (f.kind == "gaussian-well") {
    const double A = f.amplitude, w = f.width;
    const Vec c = f.center;
    return make_custom_grid(s.grid_axes, s.time.t_start, [A, w, c](const Vec& z) {
      Vec r(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) r[k] = z[k] - c[k];
      return scaled(gaussian_bump_grad(r, w), A);
    });
  }
  if (f.kind == "file") {
    FieldGrid g = field_from_snapshot_text(read_text_file(f.path));
    if (g.dim() != s.dimension)
      throw ScenarioError("initial field file has the wrong dimension");
    g.t = s.time.t_start;
    return g;
  }
  throw ScenarioError("initial_field.kind '" + f.kind + "' is not supported");
}

// Evolves the field from t_start to `until`, emitting snapshots on the
// cadence grid. For 1/t rules, emission begins once the factor is defined.
inline std::vector<FieldGrid> evolve_snapshots(const Scenario& s,
                                               const PlasticRule& rule,
                                               const StimulusPath& path,
                                               double until, int threads) {
  FieldGrid g = build_initial_grid(s, rule);
  const double emit_start =
      rule.kind == PlasticRule::Kind::potential_linear &&
              rule.time_factor == TimeFactor::one_over_t
          ? std::max(s.time.t_start, rule.t_floor)
          : s.time.t_start;
  std::vector<FieldGrid> snaps;
  auto want_emit = [&](double t) {
    if (t < emit_start - 1e-9) return false;
    const double k = (t - s.time.t_start) / s.time.snapshot_cadence;
    return std::fabs(k - std::round(k)) < 1e-6;
  };
  if (want_emit(g.t)) snaps.push_back(g);
  StepOptions sopts;
  sopts.threads = threads;
  const std::size_t n_steps = static_cast<std::size_t>(
      std::round((until - s.time.t_start) / s.time.dt_field));
  for (std::size_t i = 0; i < n_steps; ++i) {
    g = step_field(g, rule, path, s.time.dt_field, sopts);
    g.t = s.time.t_start + static_cast<double>(i + 1) * s.time.dt_field;
    if (want_emit(g.t)) snaps.push_back(g);
  }
  if (snaps.empty() || std::fabs(snaps.back().t - g.t) > 1e-9)
    snaps.push_back(g);
  if (snaps.empty()) throw ScenarioError("field evolution produced no snapshots");
  return snaps;
}

struct SystemSource {
  RhsSource src;
  std::optional<StimulusPath> path;
  std::vector<FieldGrid> snapshots;
  std::optional<PlasticRule> rule;
};

inline SystemSource build_system_source(const Scenario& s, double horizon,
                                        int threads) {
  SystemSource out;
  if (s.system.kind == "analytic") {
    out.src = RhsSource::analytic_source(formula_rhs(s.system.formula),
                                         s.dimension);
    return out;
  }
  if (s.system.kind == "switching") {
    out.src = RhsSource::switching_source(formula_rhs(s.system.pre),
                                          formula_rhs(s.system.post),
                                          s.system.t_switch, s.dimension);
    return out;
  }
  // plastic
  out.rule = make_rule(s);
  out.path = build_stimulus(s, std::max(s.time.t_end, horizon));
  out.snapshots = evolve_snapshots(s, *out.rule, *out.path,
                                   std::max(s.time.t_end, horizon), threads);
  out.src = RhsSource::snapshot_source(out.snapshots, &*out.rule);
  return out;
}

// ---- artifact writing ----

class ArtifactWriter {
 public:
  ArtifactWriter(const std::string& dir) : dir_(dir) { prepare(); }

  void write(const std::string& rel, const std::string& bytes) {
    const fs::path p = dir_ / rel;
    write_text_file(p.string(), bytes);
    written_.push_back(rel);
  }

  // Removes everything written so far; used when a run fails midway.
  void rollback() {
    std::error_code ec;
    for (const auto& rel : written_) fs::remove(dir_ / rel, ec);
    written_.clear();
  }

  void finalize(const Json& resolved, const std::string& command,
                std::uint64_t seed) {
    Json manifest;
    manifest["command"] = command;
    manifest["scenario_id"] = resolved.at("id");
    manifest["seed"] = seed;
    Json files = Json::array();
    std::sort(written_.begin(), written_.end());
    for (const auto& rel : written_) {
      const std::string bytes = read_text_file((dir_ / rel).string());
      files.push_back(Json{{"path", rel},
                           {"bytes", bytes.size()},
                           {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    manifest["files"] = files;
    write_text_file((dir_ / "manifest.json").string(), manifest.dump(2) + "\n");
  }

  const std::vector<std::string>& written() const { return written_; }
  std::string dir() const { return dir_.string(); }

 private:
  // A run owns its output directory. A fresh or empty directory is taken as
  // is; a directory holding a previous run (recognized by its manifest) is
  // cleared of exactly the files that run recorded; anything else is refused.
  void prepare() {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      return;
    }
    if (fs::is_empty(dir_)) return;
    const fs::path manifest = dir_ / "manifest.json";
    if (!fs::exists(manifest))
      throw ScenarioError("output directory '" + dir_.string() +
                          "' is not empty and holds no manifest");
    const Json m = Json::parse(read_text_file(manifest.string()));
    std::error_code ec;
    for (const auto& f : m.at("files"))
      fs::remove(dir_ / f.at("path").get<std::string>(), ec);
    fs::remove(manifest, ec);
    if (!fs::is_empty(dir_))
      throw ScenarioError("output directory '" + dir_.string() +
                          "' holds files from outside a previous run");
  }

  fs::path dir_;
  std::vector<std::string> written_;
};

inline Scenario effective_scenario(const Scenario& in, const RunOptions& opts) {
  Scenario s = in;
  if (opts.seed_override) s.stimulus.seed = *opts.seed_override;
  if (!opts.out_dir.empty()) s.out_dir = opts.out_dir;
  return s;
}

inline std::string index_name(const std::string& stem, std::size_t i,
                              const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return stem + "_" + buf + ext;
}

inline std::string gnuplot_header() {
  return "set datafile separator ','\nset key off\nset grid\n";
}

inline Json snapshot_rule_params(const Scenario& s, const PlasticRule& rule,
                                 double t) {
  Json p{{"kind", s.rule.kind}};
  if (rule.kind == PlasticRule::Kind::potential_linear) {
    p["k"] = rule.k;
    p["sigma"] = rule.sigma;
    p["time_factor"] = s.rule.time_factor;
    p["gamma"] = rule.gamma;
    p["t_floor"] = rule.t_floor;
    p["factor"] = rule.factor_defined_at(t) ? rule.factor(t) : 0.0;
  } else {
    p["coeff"] = s.rule.coeff;
  }
  return p;
}

inline Json stimulus_spec_json(const Scenario& s) {
  Json sp{{"kind", s.stimulus.kind}};
  if (s.stimulus.kind == "formula") {
    sp["formula"] = s.stimulus.formula;
    sp["amplitude"] = s.stimulus.amplitude;
    sp["omega"] = s.stimulus.omega;
    sp["phase"] = s.stimulus.phase;
    sp["value"] = s.stimulus.value;
  } else if (s.stimulus.kind == "sde") {
    sp["drift"] = s.stimulus.drift;
    sp["diffusion"] = s.stimulus.diffusion;
    sp["eta0"] = s.stimulus.eta0;
    sp["seed"] = s.stimulus.seed;
    sp["guard"] = s.stimulus.guard;
  }
  sp["dt"] = s.stimulus.dt;
  sp["interpolation"] = s.stimulus.interpolation;
  return sp;
}

}  // namespace detail_run

// ---- runners ---------------------------------------------------------------

inline RunResult run_stimulus(const Scenario& scenario_in,
                              const RunOptions& opts = {}) {
  using namespace detail_run;
  const Scenario s = effective_scenario(scenario_in, opts);
  if (s.stimulus.kind == "none")
    throw ScenarioError("scenario has no stimulus block to generate");
  ArtifactWriter w(s.out_dir);
  try {
    const Json resolved = scenario_to_json(s);
    w.write("scenario.resolved.json", resolved.dump(2) + "\n");
    const StimulusPath path = build_stimulus(s, s.time.t_end);
    w.write("stimulus.csv", stimulus_to_csv(path));
    w.write("stimulus.json",
            stimulus_sidecar(path, stimulus_spec_json(s)).dump(2) + "\n");
    w.write("plot.gp", gnuplot_header() +
                           "plot 'stimulus.csv' using 1:2 with lines\n");
    w.finalize(resolved, "stimulus", s.stimulus.seed);
    return {w.dir(), w.written(), {}};
  } catch (...) {
    w.rollback();
    throw;
  }
}

inline RunResult run_simulate(const Scenario& scenario_in,
                              const RunOptions& opts = {}) {
  using namespace detail_run;
  const Scenario s = effective_scenario(scenario_in, opts);
  if (s.x_initial.empty())
    throw ScenarioError("simulate requires x.initial conditions");
  ArtifactWriter w(s.out_dir);
  try {
    const Json resolved = scenario_to_json(s);
    w.write("scenario.resolved.json", resolved.dump(2) + "\n");

    SystemSource sys = build_system_source(s, s.time.t_end, opts.threads);
    if (sys.path) {
      w.write("stimulus.csv", stimulus_to_csv(*sys.path));
      w.write("stimulus.json",
              stimulus_sidecar(*sys.path, stimulus_spec_json(s)).dump(2) + "\n");
    }
    for (std::size_t i = 0; i < sys.snapshots.size(); ++i)
      w.write(index_name("snapshot", i, ".field"),
              field_to_snapshot_text(
                  sys.snapshots[i],
                  snapshot_rule_params(s, *sys.rule, sys.snapshots[i].t)));

    std::string plot = gnuplot_header();
    for (std::size_t i = 0; i < s.x_initial.size(); ++i) {
      Trajectory traj = integrate_trajectory(sys.src, s.x_initial[i],
                                             s.time.x_start, s.time.t_end,
                                             s.time.dt_traj);
      traj.provenance = s.id + ":seed=" + std::to_string(s.stimulus.seed);
      w.write(index_name("trajectory", i, ".csv"), trajectory_to_csv(traj));
      Json sidecar{{"scenario_id", s.id},
                   {"seed", s.stimulus.seed},
                   {"x0", s.x_initial[i]},
                   {"t_start", s.time.x_start},
                   {"t_end", s.time.t_end},
                   {"dt", s.time.dt_traj},
                   {"integrator", "rk4"}};
      w.write(index_name("trajectory", i, ".json"), sidecar.dump(2) + "\n");
      const auto speeds = velocity_magnitude_series(traj, sys.src);
      std::string vcsv = "t,speed\n";
      for (std::size_t k = 0; k < speeds.size(); ++k)
        vcsv += fmt17(traj.times[k]) + "," + fmt17(speeds[k]) + "\n";
      w.write(index_name("velocity", i, ".csv"), vcsv);
      plot += "plot '" + index_name("trajectory", i, ".csv") +
              "' using 1:2 with lines\n";
    }
    w.write("plot.gp", plot);
    w.finalize(resolved, "simulate", s.stimulus.seed);
    return {w.dir(), w.written(), {}};
  } catch (...) {
    w.rollback();
    throw;
  }
}

inline RunResult run_pullback(const Scenario& scenario_in,
                              const RunOptions& opts = {}) {
  using namespace detail_run;
  const Scenario s = effective_scenario(scenario_in, opts);
  if (!s.pullback.present)
    throw ScenarioError("scenario has no analysis.pullback block");
  ArtifactWriter w(s.out_dir);
  try {
    const Json resolved = scenario_to_json(s);
    w.write("scenario.resolved.json", resolved.dump(2) + "\n");

    std::vector<double> t0s;
    for (std::size_t i = 0; i < s.pullback.t0_count; ++i)
      t0s.push_back(s.pullback.t0_start +
                    static_cast<double>(i) * s.pullback.t0_step);

    SystemSource sys =
        build_system_source(s, s.pullback.target_t, opts.threads);
    const double b_radius = s.r_star + 1.0;

    // the sweep needs B* positively invariant; verify before evolving clouds
    CheckOptions copts;
    copts.n_samples = 128;
    copts.threads = opts.threads;
    const auto inv = check_boundary_inward(
        sys.src, b_radius, {t0s.back(), t0s.front(), s.pullback.target_t}, copts);
    if (!inv.passed)
      throw InvarianceError("B* is not positively invariant for this system",
                            inv.worst_witness.at("x").get<Vec>(),
                            inv.worst_witness.at("t").get<double>());

    CloudOptions cl;
    cl.cloud_n = s.pullback.cloud;
    cl.eps = s.pullback.eps;
    cl.dt = s.pullback.dt;
    cl.invariance_margin = s.pullback.invariance_margin;
    cl.threads = opts.threads;
    const PullbackSweep sweep = pullback_attractor_estimate(
        sys.src, b_radius, s.pullback.target_t, t0s, cl);

    w.write("sweep.csv", sweep_to_csv(sweep));
    for (std::size_t i = 0; i < sweep.estimates.size(); ++i)
      w.write(index_name("estimate", i, ".json"),
              sweep.estimates[i].to_json().dump() + "\n");
    Json summary{{"converged", sweep.converged},
                 {"converged_t0",
                  sweep.converged ? Json(t0s[sweep.converged_index]) : Json()},
                 {"gaps", sweep.hausdorff_gaps},
                 {"nesting_defects", sweep.nesting_defects},
                 {"note", "two-gap convergence rule is a heuristic"}};
    w.write("pullback_summary.json", summary.dump(2) + "\n");
    w.write("plot.gp",
            gnuplot_header() + "plot 'sweep.csv' using 1:4 with linespoints\n");
    w.finalize(resolved, "pullback", s.stimulus.seed);
    return {w.dir(), w.written(), {}};
  } catch (...) {
    w.rollback();
    throw;
  }
}

inline RunResult run_forward(const Scenario& scenario_in,
                             const RunOptions& opts = {}) {
  using namespace detail_run;
  const Scenario s = effective_scenario(scenario_in, opts);
  if (!s.forward.present)
    throw ScenarioError("scenario has no analysis.forward block");
  ArtifactWriter w(s.out_dir);
  try {
    const Json resolved = scenario_to_json(s);
    w.write("scenario.resolved.json", resolved.dump(2) + "\n");

    SystemSource sys = build_system_source(s, s.forward.t_end, opts.threads);
    const double b_radius = s.r_star + 1.0;

    CheckOptions copts;
    copts.n_samples = 128;
    copts.threads = opts.threads;
    const auto inv = check_boundary_inward(
        sys.src, b_radius, {s.forward.t0_list.front(), s.forward.t_end}, copts);
    if (!inv.passed)
      throw InvarianceError("B* is not positively invariant for this system",
                            inv.worst_witness.at("x").get<Vec>(),
                            inv.worst_witness.at("t").get<double>());

    CloudOptions cl;
    cl.cloud_n = s.forward.cloud;
    cl.eps = s.forward.eps;
    cl.dt = s.forward.dt;
    cl.sample_cadence = s.forward.sample_cadence;
    cl.invariance_margin = s.forward.invariance_margin;
    cl.threads = opts.threads;
    const auto result = forward_attracting_set(
        sys.src, b_radius, s.forward.t0_list, s.forward.burn_offset,
        s.forward.t_end, cl);

    w.write("omega_star.json", result.omega_star.to_json().dump() + "\n");
    for (std::size_t i = 0; i < result.per_t0.size(); ++i)
      w.write(index_name("omega_t0", i, ".json"),
              result.per_t0[i].to_json().dump() + "\n");
    Json summary{{"monotonicity_defects", result.monotonicity_defects},
                 {"n_points", result.omega_star.points.size()},
                 {"n_boxes", result.omega_star.boxes.size()}};
    w.write("forward_summary.json", summary.dump(2) + "\n");

    // how fast the full absorbing ball approaches the estimated set
    const auto rep = forward_attraction_check(
        sys.src, result.omega_star, {ball_cloud(s.dimension, b_radius, 128)},
        s.forward.t0_list.front(), s.forward.t_end, cl);
    std::string att = "t,directed_dist\n";
    for (std::size_t i = 0; i < rep.times.size(); ++i)
      att += fmt17(rep.times[i]) + "," + fmt17(rep.directed_dist[0][i]) + "\n";
    w.write("attraction.csv", att);
    w.write("plot.gp", gnuplot_header() +
                           "plot 'attraction.csv' using 1:2 with lines\n");
    w.finalize(resolved, "forward", s.stimulus.seed);
    return {w.dir(), w.written(), {}};
  } catch (...) {
    w.rollback();
    throw;
  }
}

inline RunResult run_check(const Scenario& scenario_in,
                           const RunOptions& opts = {}) {
  using namespace detail_run;
  const Scenario s = effective_scenario(scenario_in, opts);
  if (!s.checks.present || s.checks.run.empty())
    throw ScenarioError("scenario has no analysis.checks block");
  ArtifactWriter w(s.out_dir);
  try {
    const Json resolved = scenario_to_json(s);
    w.write("scenario.resolved.json", resolved.dump(2) + "\n");

    CheckOptions copts;
    copts.n_samples = s.checks.n_samples;
    copts.tolerance = s.checks.tolerance_ineq;
    copts.threads = opts.threads;

    RuleDomain dom;
    dom.d = s.dimension;
    dom.a_radius = s.checks.a_radius;
    dom.x_radius = s.checks.x_radius;
    dom.y_radius = s.checks.y_radius;
    dom.t_lo = s.time.t_start;
    dom.t_hi = s.time.t_end;

    bool all_passed = true;
    Json summary = Json::array();
    std::optional<SystemSource> sys;  // built lazily, shared by A1/A2/invariance
    auto system_source = [&]() -> SystemSource& {
      if (!sys) {
        double horizon = s.time.t_end;
        for (double t : s.checks.times) horizon = std::max(horizon, t);
        sys = build_system_source(s, horizon, opts.threads);
      }
      return *sys;
    };

    for (const std::string& name : s.checks.run) {
      CheckReport rep;
      if (name == "A2") {
        rep = check_dissipativity_A2(system_source().src, s.r_star,
                                     s.checks.times, copts);
      } else if (name == "invariance") {
        rep = check_boundary_inward(system_source().src, s.r_star + 1.0,
                                    s.checks.times, copts);
      } else if (name == "A1") {
        if (s.system.kind == "plastic")
          throw ScenarioError(
              "the A1 gradient-consistency check needs an analytic or switching system");
        auto& src = system_source().src;
        auto f = [&src](const Vec& x, double t) { return src.eval(x, t); };
        std::function<std::vector<double>(const Vec&, double)> grad;
        if (s.system.kind == "analytic") {
          grad = formula_grad(s.system.formula, s.dimension);
        } else {
          auto pre = formula_grad(s.system.pre, s.dimension);
          auto post = formula_grad(s.system.post, s.dimension);
          const double ts = s.system.t_switch;
          grad = [pre, post, ts](const Vec& x, double t) {
            return t <= ts ? pre(x, t) : post(x, t);
          };
        }
        const double r = s.r_star + 1.0;
        rep = check_gradient_consistency_A1(
            f, grad, Vec(s.dimension, -r), Vec(s.dimension, r), s.checks.times,
            copts);
      } else if (name == "C1" || name == "C3") {
        rep = check_smoothness_increment(make_rule(s), dom, name == "C1" ? 0 : 1,
                                         copts);
      } else if (name == "C2") {
        rep = check_growth_C2(make_rule(s), dom, copts);
      } else if (name == "C4") {
        rep = check_C4(make_rule(s), s.r_star, dom, copts);
      } else if (name == "symmetry") {
        if (s.system.kind != "plastic" || s.dimension < 2)
          throw ScenarioError(
              "the symmetry check needs a plastic system of dimension >= 2");
        rep = check_symmetry_potential(system_source().snapshots.back(), copts);
      } else if (name == "preservation") {
        const PlasticRule rule = make_rule(s);
        const FieldGrid a0 = build_initial_grid(s, rule);
        const double t_end = s.checks.preservation_t_end > 0.0
                                 ? s.checks.preservation_t_end
                                 : s.time.t_end;
        const StimulusPath path = build_stimulus(s, t_end);
        PreservationOptions popts;
        popts.dt = s.time.dt_field;
        popts.n_samples = s.checks.n_samples;
        popts.tolerance = s.checks.tolerance_ineq;
        popts.threads = opts.threads;
        rep = check_dissipativity_preservation(rule, a0, path, t_end, s.r_star,
                                               popts);
      }
      all_passed = all_passed && rep.passed;
      summary.push_back(Json{{"name", rep.name}, {"passed", rep.passed}});
      w.write("check_" + name + ".json", rep.to_json().dump(2) + "\n");
    }
    w.write("check_summary.json",
            Json{{"all_passed", all_passed}, {"checks", summary}}.dump(2) + "\n");
    w.finalize(resolved, "check", s.stimulus.seed);
    RunResult r{w.dir(), w.written(), all_passed};
    return r;
  } catch (...) {
    w.rollback();
    throw;
  }
}

}  // namespace plastica
