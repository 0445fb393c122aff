#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plastica/attractor.hpp"
#include "plastica/checks.hpp"
#include "plastica/errors.hpp"
#include "plastica/field.hpp"
#include "plastica/io.hpp"
#include "plastica/stimulus.hpp"
#include "plastica/toml_lite.hpp"
#include "plastica/trajectory.hpp"

namespace plastica {

// ---- Scenario model -------------------------------------------------------
//
// A scenario is a fully declarative description of one run: the time window,
// the stimulus, the plasticity rule, the grid, the observable system and the
// analysis blocks. Scenario files are TOML (see toml_lite) or JSON with the
// same structure; parsing is strict, unknown keys are rejected, and the
// resolved scenario (all defaults materialized) is persisted next to the
// artifacts so a run can be reproduced from its output directory alone.

struct TimeWindow {
  double t_min = 0.0;    // stimulus domain start
  double t_start = 0.0;  // field evolution start; the field is a0 before this
  double x_start = 0.0;  // trajectory start (defaults to t_start)
  double t_end = 0.0;
  double dt_field = 0.01;
  double dt_traj = 0.01;
  double snapshot_cadence = 0.1;
};

struct StimulusSpec {
  std::string kind = "none";  // none | formula | sde
  // formula
  std::string formula = "zero";  // zero | constant | sin
  double amplitude = 1.0;
  double omega = 1.0;
  double phase = 0.0;
  double value = 0.0;
  // sde
  std::string drift = "double-well";
  double diffusion = 0.5;
  double eta0 = 0.0;
  std::uint64_t seed = 0;
  double guard = 1e6;
  // shared
  double dt = 0.001;
  std::string interpolation = "linear";
};

struct RuleSpec {
  std::string kind = "none";  // none | potential-linear | radial
  double k = 0.5;
  double sigma = 1.0;
  std::string time_factor = "constant";  // constant | one-over-t
  double gamma = 1.0;
  double t_floor = 1.0;
  double coeff = 0.0;  // radial: c(a,z,y,t) = coeff * z
};

struct InitialFieldSpec {
  std::string kind = "zero";  // zero | gaussian-well | linear | file
  double amplitude = 1.0;
  double width = 1.0;
  Vec center;        // defaults to the origin
  double slope = -1.0;  // linear: a0(z) = slope * z
  std::string path;  // file
};

struct SystemSpec {
  std::string kind = "plastic";  // plastic | analytic | switching
  std::string formula = "linear_decay";
  std::string pre = "linear_decay";
  std::string post = "cubic_pitchfork";
  double t_switch = 0.0;
};

struct PullbackBlock {
  bool present = false;
  double target_t = 0.0;
  double t0_start = -1.0;
  double t0_step = -1.0;
  std::size_t t0_count = 8;
  std::size_t cloud = 512;
  double eps = 0.02;
  double dt = 0.01;
  double invariance_margin = -1.0;
};

struct ForwardBlock {
  bool present = false;
  std::vector<double> t0_list;
  double burn_offset = 2.0;
  double t_end = 30.0;
  std::size_t cloud = 512;
  double eps = 0.02;
  double dt = 0.01;
  double sample_cadence = 0.05;
  double invariance_margin = -1.0;
};

struct ChecksBlock {
  bool present = false;
  std::vector<std::string> run;
  double tolerance_eq = 1e-8;
  double tolerance_ineq = 1e-3;
  std::size_t n_samples = 512;
  std::vector<double> times{0.0};
  double preservation_t_end = 0.0;  // 0 -> time.t_end
  double a_radius = 2.0;
  double y_radius = 2.0;
  double x_radius = 3.0;
};

struct Scenario {
  std::string id;
  std::size_t dimension = 1;
  TimeWindow time;
  StimulusSpec stimulus;
  RuleSpec rule;
  std::vector<Axis> grid_axes;
  InitialFieldSpec initial_field;
  SystemSpec system;
  std::vector<Vec> x_initial;
  double r_star = 1.0;
  bool reset_by_stimulus = false;  // reserved, must stay false
  PullbackBlock pullback;
  ForwardBlock forward;
  ChecksBlock checks;
  std::string out_dir = "out";
};

// ---- Parsing --------------------------------------------------------------

namespace detail_scn {

inline void reject_unknown(const Json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ScenarioError("unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T need(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw ScenarioError("missing key '" + std::string(key) + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception&) {
    throw ScenarioError("key '" + std::string(key) + "' in " + where +
                        " has the wrong type");
  }
}

template <class T>
T get_or(const Json& obj, const char* key, T def, const std::string& where) {
  if (!obj.contains(key)) return def;
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception&) {
    throw ScenarioError("key '" + std::string(key) + "' in " + where +
                        " has the wrong type");
  }
}

inline void check_one_of(const std::string& value, const char* key,
                         std::initializer_list<const char*> allowed) {
  for (const char* k : allowed)
    if (value == k) return;
  std::string opts;
  for (const char* k : allowed) opts += std::string(opts.empty() ? "" : ", ") + k;
  throw ScenarioError(std::string("'") + key + "' must be one of {" + opts +
                      "}, got '" + value + "'");
}

}  // namespace detail_scn

inline Scenario scenario_from_json(const Json& j) {
  using namespace detail_scn;
  Scenario s;
  reject_unknown(j, "scenario",
                 {"id", "dimension", "time", "stimulus", "rule", "grid",
                  "initial_field", "system", "x", "analysis", "output"});
  s.id = need<std::string>(j, "id", "scenario");
  const std::int64_t dim = need<std::int64_t>(j, "dimension", "scenario");
  if (dim < 1 || dim > 3)
    throw ScenarioError("dimension must be 1, 2 or 3");
  s.dimension = static_cast<std::size_t>(dim);

  {
    const Json& t = j.contains("time") ? j.at("time") : Json::object();
    reject_unknown(t, "time",
                   {"t_min", "t_start", "x_start", "t_end", "dt_field",
                    "dt_traj", "snapshot_cadence"});
    s.time.t_min = need<double>(t, "t_min", "time");
    s.time.t_start = need<double>(t, "t_start", "time");
    s.time.t_end = need<double>(t, "t_end", "time");
    s.time.x_start = get_or<double>(t, "x_start", s.time.t_start, "time");
    s.time.dt_field = get_or<double>(t, "dt_field", 0.01, "time");
    s.time.dt_traj = get_or<double>(t, "dt_traj", 0.01, "time");
    s.time.snapshot_cadence =
        get_or<double>(t, "snapshot_cadence", 10.0 * s.time.dt_field, "time");
    if (!(s.time.t_min <= s.time.t_start))
      throw ScenarioError("time window requires t_min <= t_start");
    if (!(s.time.t_start < s.time.t_end))
      throw ScenarioError("time window requires t_start < t_end");
    if (!(s.time.x_start >= s.time.t_start && s.time.x_start < s.time.t_end))
      throw ScenarioError("time window requires t_start <= x_start < t_end");
    if (!(s.time.dt_field > 0.0 && s.time.dt_traj > 0.0))
      throw ScenarioError("time steps must be positive");
    const double ratio = s.time.snapshot_cadence / s.time.dt_field;
    if (!(s.time.snapshot_cadence > 0.0) ||
        std::fabs(ratio - std::round(ratio)) > 1e-9)
      throw ScenarioError("snapshot_cadence must be a positive multiple of dt_field");
  }

  if (j.contains("stimulus")) {
    const Json& st = j.at("stimulus");
    reject_unknown(st, "stimulus",
                   {"kind", "formula", "amplitude", "omega", "phase", "value",
                    "drift", "diffusion", "eta0", "seed", "guard", "dt",
                    "interpolation"});
    s.stimulus.kind = get_or<std::string>(st, "kind", "none", "stimulus");
    check_one_of(s.stimulus.kind, "stimulus.kind", {"none", "formula", "sde"});
    s.stimulus.formula = get_or<std::string>(st, "formula", "zero", "stimulus");
    check_one_of(s.stimulus.formula, "stimulus.formula",
                 {"zero", "constant", "sin"});
    s.stimulus.amplitude = get_or<double>(st, "amplitude", 1.0, "stimulus");
    s.stimulus.omega = get_or<double>(st, "omega", 1.0, "stimulus");
    s.stimulus.phase = get_or<double>(st, "phase", 0.0, "stimulus");
    s.stimulus.value = get_or<double>(st, "value", 0.0, "stimulus");
    s.stimulus.drift = get_or<std::string>(st, "drift", "double-well", "stimulus");
    check_one_of(s.stimulus.drift, "stimulus.drift", {"double-well"});
    s.stimulus.diffusion = get_or<double>(st, "diffusion", 0.5, "stimulus");
    s.stimulus.eta0 = get_or<double>(st, "eta0", 0.0, "stimulus");
    s.stimulus.seed = get_or<std::uint64_t>(st, "seed", 0, "stimulus");
    s.stimulus.guard = get_or<double>(st, "guard", 1e6, "stimulus");
    s.stimulus.dt = get_or<double>(st, "dt", 0.001, "stimulus");
    s.stimulus.interpolation =
        get_or<std::string>(st, "interpolation", "linear", "stimulus");
    check_one_of(s.stimulus.interpolation, "stimulus.interpolation",
                 {"linear", "constant"});
    if (!(s.stimulus.dt > 0.0))
      throw ScenarioError("stimulus.dt must be positive");
    if (s.stimulus.diffusion < 0.0)
      throw ScenarioError("stimulus.diffusion must be >= 0");
  }

  if (j.contains("rule")) {
    const Json& r = j.at("rule");
    reject_unknown(r, "rule",
                   {"kind", "k", "sigma", "time_factor", "gamma", "t_floor",
                    "coeff"});
    s.rule.kind = get_or<std::string>(r, "kind", "none", "rule");
    check_one_of(s.rule.kind, "rule.kind",
                 {"none", "potential-linear", "radial"});
    s.rule.k = get_or<double>(r, "k", 0.5, "rule");
    s.rule.sigma = get_or<double>(r, "sigma", 1.0, "rule");
    s.rule.time_factor =
        get_or<std::string>(r, "time_factor", "constant", "rule");
    check_one_of(s.rule.time_factor, "rule.time_factor",
                 {"constant", "one-over-t"});
    s.rule.gamma = get_or<double>(r, "gamma", 1.0, "rule");
    s.rule.t_floor = get_or<double>(r, "t_floor", 1.0, "rule");
    s.rule.coeff = get_or<double>(r, "coeff", 0.0, "rule");
    if (s.rule.kind == "potential-linear" && !(s.rule.sigma > 0.0))
      throw ScenarioError("potential-linear rule requires sigma > 0");
    if (s.rule.kind == "potential-linear" && s.rule.k < 0.0)
      throw ScenarioError("potential-linear rule requires k >= 0");
    if (s.rule.time_factor == "one-over-t" && !(s.rule.t_floor > 0.0))
      throw ScenarioError("one-over-t factor requires t_floor > 0");
  }

  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    reject_unknown(g, "grid", {"axes"});
    for (const Json& ax : need<Json>(g, "axes", "grid")) {
      if (!ax.is_array() || ax.size() != 3)
        throw ScenarioError("grid.axes entries must be [lo, hi, n]");
      Axis a;
      a.lo = ax.at(0).get<double>();
      a.hi = ax.at(1).get<double>();
      const std::int64_t n = ax.at(2).get<std::int64_t>();
      if (n < 2) throw ScenarioError("grid axes need at least two nodes");
      a.n = static_cast<std::size_t>(n);
      if (!(a.lo < a.hi)) throw ScenarioError("grid axes must be increasing");
      s.grid_axes.push_back(a);
    }
    if (!s.grid_axes.empty() && s.grid_axes.size() != s.dimension)
      throw ScenarioError("grid.axes must list one axis per dimension");
  }

  if (j.contains("initial_field")) {
    const Json& f = j.at("initial_field");
    reject_unknown(f, "initial_field",
                   {"kind", "amplitude", "width", "center", "slope", "path"});
    s.initial_field.kind = get_or<std::string>(f, "kind", "zero", "initial_field");
    check_one_of(s.initial_field.kind, "initial_field.kind",
                 {"zero", "gaussian-well", "linear", "file"});
    s.initial_field.amplitude = get_or<double>(f, "amplitude", 1.0, "initial_field");
    s.initial_field.width = get_or<double>(f, "width", 1.0, "initial_field");
    s.initial_field.center =
        get_or<Vec>(f, "center", Vec(s.dimension, 0.0), "initial_field");
    s.initial_field.slope = get_or<double>(f, "slope", -1.0, "initial_field");
    s.initial_field.path = get_or<std::string>(f, "path", "", "initial_field");
    if (s.initial_field.center.size() != s.dimension)
      throw ScenarioError("initial_field.center must have `dimension` entries");
    if (s.initial_field.kind == "gaussian-well" && !(s.initial_field.width > 0.0))
      throw ScenarioError("initial_field.width must be positive");
    if (s.initial_field.kind == "file" && s.initial_field.path.empty())
      throw ScenarioError("initial_field.kind = file requires a path");
  } else {
    s.initial_field.center = Vec(s.dimension, 0.0);
  }

  {
    const Json& sys = j.contains("system") ? j.at("system") : Json::object();
    reject_unknown(sys, "system", {"kind", "formula", "pre", "post", "t_switch"});
    s.system.kind = get_or<std::string>(sys, "kind", "plastic", "system");
    check_one_of(s.system.kind, "system.kind",
                 {"plastic", "analytic", "switching"});
    s.system.formula =
        get_or<std::string>(sys, "formula", "linear_decay", "system");
    s.system.pre = get_or<std::string>(sys, "pre", "linear_decay", "system");
    s.system.post =
        get_or<std::string>(sys, "post", "cubic_pitchfork", "system");
    s.system.t_switch = get_or<double>(sys, "t_switch", 0.0, "system");
    for (const std::string& f : {s.system.formula, s.system.pre, s.system.post})
      check_one_of(f, "system formula",
                   {"linear_decay", "cubic_pitchfork", "decay_plus_sin", "zero"});
    if (s.system.kind == "plastic") {
      if (s.rule.kind == "none")
        throw ScenarioError("plastic system requires a rule block");
      if (s.grid_axes.empty())
        throw ScenarioError("plastic system requires grid.axes");
      if (s.stimulus.kind == "none")
        throw ScenarioError("plastic system requires a stimulus block");
    }
  }

  if (j.contains("x")) {
    const Json& x = j.at("x");
    reject_unknown(x, "x", {"initial", "R_star", "reset_by_stimulus"});
    for (const Json& p : get_or<Json>(x, "initial", Json::array(), "x")) {
      const Vec v = p.get<Vec>();
      if (v.size() != s.dimension)
        throw ScenarioError("x.initial entries must have `dimension` entries");
      s.x_initial.push_back(v);
    }
    s.r_star = get_or<double>(x, "R_star", 1.0, "x");
    s.reset_by_stimulus = get_or<bool>(x, "reset_by_stimulus", false, "x");
    if (s.reset_by_stimulus)
      throw ScenarioError(
          "x.reset_by_stimulus is reserved for a future extension and must be false");
  }

  if (j.contains("analysis")) {
    const Json& an = j.at("analysis");
    reject_unknown(an, "analysis", {"pullback", "forward", "checks"});
    if (an.contains("pullback")) {
      const Json& p = an.at("pullback");
      reject_unknown(p, "analysis.pullback",
                     {"target_t", "t0_start", "t0_step", "t0_count", "cloud",
                      "eps", "dt", "invariance_margin"});
      s.pullback.present = true;
      s.pullback.target_t = need<double>(p, "target_t", "analysis.pullback");
      s.pullback.t0_start = need<double>(p, "t0_start", "analysis.pullback");
      s.pullback.t0_step = need<double>(p, "t0_step", "analysis.pullback");
      s.pullback.t0_count = get_or<std::uint64_t>(p, "t0_count", 8, "analysis.pullback");
      s.pullback.cloud = get_or<std::uint64_t>(p, "cloud", 512, "analysis.pullback");
      s.pullback.eps = get_or<double>(p, "eps", 0.02, "analysis.pullback");
      s.pullback.dt = get_or<double>(p, "dt", 0.01, "analysis.pullback");
      s.pullback.invariance_margin =
          get_or<double>(p, "invariance_margin", -1.0, "analysis.pullback");
      if (!(s.pullback.t0_step < 0.0))
        throw ScenarioError("analysis.pullback.t0_step must be negative");
      if (s.pullback.t0_start > s.pullback.target_t)
        throw ScenarioError("analysis.pullback.t0_start must be <= target_t");
      if (s.pullback.t0_count < 2)
        throw ScenarioError("analysis.pullback.t0_count must be >= 2");
    }
    if (an.contains("forward")) {
      const Json& f = an.at("forward");
      reject_unknown(f, "analysis.forward",
                     {"t0_list", "burn_offset", "t_end", "cloud", "eps", "dt",
                      "sample_cadence", "invariance_margin"});
      s.forward.present = true;
      s.forward.t0_list = need<std::vector<double>>(f, "t0_list", "analysis.forward");
      s.forward.burn_offset = get_or<double>(f, "burn_offset", 2.0, "analysis.forward");
      s.forward.t_end = need<double>(f, "t_end", "analysis.forward");
      s.forward.cloud = get_or<std::uint64_t>(f, "cloud", 512, "analysis.forward");
      s.forward.eps = get_or<double>(f, "eps", 0.02, "analysis.forward");
      s.forward.dt = get_or<double>(f, "dt", 0.01, "analysis.forward");
      s.forward.sample_cadence =
          get_or<double>(f, "sample_cadence", 0.05, "analysis.forward");
      s.forward.invariance_margin =
          get_or<double>(f, "invariance_margin", -1.0, "analysis.forward");
      if (s.forward.t0_list.empty())
        throw ScenarioError("analysis.forward.t0_list must not be empty");
      for (double t0 : s.forward.t0_list)
        if (t0 + s.forward.burn_offset >= s.forward.t_end)
          throw ScenarioError("analysis.forward window is empty for some t0");
    }
    if (an.contains("checks")) {
      const Json& c = an.at("checks");
      reject_unknown(c, "analysis.checks",
                     {"run", "tolerance_eq", "tolerance_ineq", "n_samples",
                      "times", "preservation_t_end", "a_radius", "y_radius",
                      "x_radius"});
      s.checks.present = true;
      s.checks.run = need<std::vector<std::string>>(c, "run", "analysis.checks");
      for (const std::string& name : s.checks.run)
        detail_scn::check_one_of(name, "analysis.checks.run",
                                 {"A1", "A2", "C1", "C2", "C3", "C4",
                                  "symmetry", "preservation", "invariance"});
      s.checks.tolerance_eq = get_or<double>(c, "tolerance_eq", 1e-8, "analysis.checks");
      s.checks.tolerance_ineq =
          get_or<double>(c, "tolerance_ineq", 1e-3, "analysis.checks");
      s.checks.n_samples = get_or<std::uint64_t>(c, "n_samples", 512, "analysis.checks");
      s.checks.times =
          get_or<std::vector<double>>(c, "times", {s.time.t_start}, "analysis.checks");
      s.checks.preservation_t_end =
          get_or<double>(c, "preservation_t_end", 0.0, "analysis.checks");
      s.checks.a_radius = get_or<double>(c, "a_radius", 2.0, "analysis.checks");
      s.checks.y_radius = get_or<double>(c, "y_radius", 2.0, "analysis.checks");
      s.checks.x_radius = get_or<double>(c, "x_radius", 3.0, "analysis.checks");
    }
  }

  if (j.contains("output")) {
    const Json& o = j.at("output");
    reject_unknown(o, "output", {"dir"});
    s.out_dir = get_or<std::string>(o, "dir", "out", "output");
  }

  return s;
}

// Fully resolved scenario; parsing this Json again yields the same Scenario.
inline Json scenario_to_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["dimension"] = s.dimension;
  j["time"] = Json{{"t_min", s.time.t_min},
                   {"t_start", s.time.t_start},
                   {"x_start", s.time.x_start},
                   {"t_end", s.time.t_end},
                   {"dt_field", s.time.dt_field},
                   {"dt_traj", s.time.dt_traj},
                   {"snapshot_cadence", s.time.snapshot_cadence}};
  j["stimulus"] = Json{{"kind", s.stimulus.kind},
                       {"formula", s.stimulus.formula},
                       {"amplitude", s.stimulus.amplitude},
                       {"omega", s.stimulus.omega},
                       {"phase", s.stimulus.phase},
                       {"value", s.stimulus.value},
                       {"drift", s.stimulus.drift},
                       {"diffusion", s.stimulus.diffusion},
                       {"eta0", s.stimulus.eta0},
                       {"seed", s.stimulus.seed},
                       {"guard", s.stimulus.guard},
                       {"dt", s.stimulus.dt},
                       {"interpolation", s.stimulus.interpolation}};
  j["rule"] = Json{{"kind", s.rule.kind},
                   {"k", s.rule.k},
                   {"sigma", s.rule.sigma},
                   {"time_factor", s.rule.time_factor},
                   {"gamma", s.rule.gamma},
                   {"t_floor", s.rule.t_floor},
                   {"coeff", s.rule.coeff}};
  if (!s.grid_axes.empty()) {
    Json axes = Json::array();
    for (const Axis& a : s.grid_axes) axes.push_back({a.lo, a.hi, a.n});
    j["grid"] = Json{{"axes", axes}};
  }
  j["initial_field"] = Json{{"kind", s.initial_field.kind},
                            {"amplitude", s.initial_field.amplitude},
                            {"width", s.initial_field.width},
                            {"center", s.initial_field.center},
                            {"slope", s.initial_field.slope},
                            {"path", s.initial_field.path}};
  j["system"] = Json{{"kind", s.system.kind},
                     {"formula", s.system.formula},
                     {"pre", s.system.pre},
                     {"post", s.system.post},
                     {"t_switch", s.system.t_switch}};
  {
    Json x;
    Json init = Json::array();
    for (const Vec& v : s.x_initial) init.push_back(v);
    x["initial"] = init;
    x["R_star"] = s.r_star;
    x["reset_by_stimulus"] = s.reset_by_stimulus;
    j["x"] = x;
  }
  Json an = Json::object();
  if (s.pullback.present)
    an["pullback"] = Json{{"target_t", s.pullback.target_t},
                          {"t0_start", s.pullback.t0_start},
                          {"t0_step", s.pullback.t0_step},
                          {"t0_count", s.pullback.t0_count},
                          {"cloud", s.pullback.cloud},
                          {"eps", s.pullback.eps},
                          {"dt", s.pullback.dt},
                          {"invariance_margin", s.pullback.invariance_margin}};
  if (s.forward.present)
    an["forward"] = Json{{"t0_list", s.forward.t0_list},
                         {"burn_offset", s.forward.burn_offset},
                         {"t_end", s.forward.t_end},
                         {"cloud", s.forward.cloud},
                         {"eps", s.forward.eps},
                         {"dt", s.forward.dt},
                         {"sample_cadence", s.forward.sample_cadence},
                         {"invariance_margin", s.forward.invariance_margin}};
  if (s.checks.present)
    an["checks"] = Json{{"run", s.checks.run},
                        {"tolerance_eq", s.checks.tolerance_eq},
                        {"tolerance_ineq", s.checks.tolerance_ineq},
                        {"n_samples", s.checks.n_samples},
                        {"times", s.checks.times},
                        {"preservation_t_end", s.checks.preservation_t_end},
                        {"a_radius", s.checks.a_radius},
                        {"y_radius", s.checks.y_radius},
                        {"x_radius", s.checks.x_radius}};
  if (!an.empty()) j["analysis"] = an;
  j["output"] = Json{{"dir", s.out_dir}};
  return j;
}

// Accepts TOML or JSON (detected by the first non-space character).
inline Scenario parse_scenario(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  Json doc;
  if (i < text.size() && text[i] == '{') {
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      // nlohmann reports a byte offset; recover line/column for the report
      int line = 1, col = 1;
      for (std::size_t p = 0; p + 1 < e.byte && p < text.size(); ++p) {
        if (text[p] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      throw ScenarioError(std::string("JSON parse error: ") + e.what(), line, col);
    }
  } else {
    doc = toml_lite::parse(text);
  }
  return scenario_from_json(doc);
}

inline Scenario load_scenario_file(const std::string& path) {
  return parse_scenario(read_text_file(path));
}

}  // namespace plastica
