#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plastica/plastica.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 1;
constexpr int kExitNumericError = 2;
constexpr int kExitCheckFailure = 3;

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario file (TOML or JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory (overrides the scenario)")
      ->envname("PLASTICA_OUT");
  cmd->add_option("--seed", args.seed, "Stimulus seed override");
  cmd->add_option("--threads", args.threads, "Worker threads")
      ->envname("PLASTICA_THREADS")
      ->check(CLI::PositiveNumber);
}

plastica::RunOptions to_options(const CommonArgs& args) {
  plastica::RunOptions opts;
  opts.out_dir = args.out_dir;
  opts.threads = args.threads;
  opts.seed_override = args.seed;
  return opts;
}

void report(const plastica::RunResult& r, const char* what) {
  std::printf("%s: wrote %zu artifact(s) to %s\n", what, r.files.size() + 1,
              r.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and analysis toolkit for dynamical systems with plastic vector fields"};
  app.require_subcommand(1);

  CommonArgs sim_args, pull_args, fwd_args, chk_args, stim_args;
  auto* sim = app.add_subcommand("simulate",
                                 "Run the stimulus/field/trajectory pipeline");
  add_common(sim, sim_args);
  auto* pull = app.add_subcommand("pullback", "Estimate the pullback attractor");
  add_common(pull, pull_args);
  auto* fwd = app.add_subcommand("forward",
                                 "Estimate forward limit sets and their union");
  add_common(fwd, fwd_args);
  auto* chk = app.add_subcommand("check", "Run the scenario's hypothesis checks");
  add_common(chk, chk_args);
  auto* stim = app.add_subcommand("stimulus", "Generate the stimulus only");
  add_common(stim, stim_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const auto s = plastica::load_scenario_file(sim_args.scenario_path);
      report(plastica::run_simulate(s, to_options(sim_args)), "simulate");
    } else if (pull->parsed()) {
      const auto s = plastica::load_scenario_file(pull_args.scenario_path);
      report(plastica::run_pullback(s, to_options(pull_args)), "pullback");
    } else if (fwd->parsed()) {
      const auto s = plastica::load_scenario_file(fwd_args.scenario_path);
      report(plastica::run_forward(s, to_options(fwd_args)), "forward");
    } else if (chk->parsed()) {
      const auto s = plastica::load_scenario_file(chk_args.scenario_path);
      const auto r = plastica::run_check(s, to_options(chk_args));
      report(r, "check");
      if (!r.checks_passed.value_or(false)) {
        std::fprintf(stderr, "check: at least one check failed\n");
        return kExitCheckFailure;
      }
    } else if (stim->parsed()) {
      const auto s = plastica::load_scenario_file(stim_args.scenario_path);
      report(plastica::run_stimulus(s, to_options(stim_args)), "stimulus");
    }
  } catch (const plastica::ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return kExitScenarioError;
  } catch (const plastica::Error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericError;
  }
  return kExitOk;
}
