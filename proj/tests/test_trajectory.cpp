#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "plastica/trajectory.hpp"

using namespace plastica;

namespace {

RhsSource linear_decay_1d() {
  return RhsSource::analytic_source(
      [](const Vec& x, double) { return Vec{-x[0]}; }, 1);
}

}  // namespace

TEST_CASE("linear decay reaches e^{-2} after two time units") {
  auto traj = integrate_trajectory(linear_decay_1d(), Vec{1.0}, 0.0, 2.0, 1e-3);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == Catch::Approx(2.0).margin(1e-12));
  CHECK(traj.states.back()[0] == Catch::Approx(std::exp(-2.0)).margin(1e-10));
}

TEST_CASE("zero field keeps the trajectory constant") {
  auto src = RhsSource::analytic_source(
      [](const Vec& x, double) { return Vec(x.size(), 0.0); }, 2);
  auto traj = integrate_trajectory(src, Vec{0.3, -0.7}, 0.0, 5.0, 0.01);
  for (const auto& s : traj.states) CHECK(s == Vec{0.3, -0.7});
}

TEST_CASE("initial condition is reproduced exactly") {
  auto traj = integrate_trajectory(linear_decay_1d(), Vec{0.42}, 1.5, 2.0, 0.01);
  CHECK(traj.times.front() == 1.5);
  CHECK(traj.states.front() == Vec{0.42});
}

TEST_CASE("snapshot pipeline reproduces the analytic decay") {
  // static field a(z) = -z captured in a few snapshots; temporal blending of
  // identical grids is exact, multilinear interpolation of affine is exact
  std::vector<FieldGrid> snaps;
  for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    auto g = make_custom_grid({Axis{-2.0, 2.0, 33}}, t,
                              [](const Vec& z) { return Vec{-z[0]}; });
    snaps.push_back(std::move(g));
  }
  auto src = RhsSource::snapshot_source(std::move(snaps));
  auto traj = integrate_trajectory(src, Vec{1.0}, 0.0, 2.0, 1e-3);
  CHECK(std::fabs(traj.states.back()[0] - std::exp(-2.0)) <= 1e-6);
}

TEST_CASE("switching right-hand side values") {
  CHECK(switching_rhs(Vec{1.0}, 1.0, 0.0) == Vec{0.0});
  CHECK(switching_rhs(Vec{2.0}, -1.0, 0.0) == Vec{-2.0});
  CHECK(switching_rhs(Vec{0.5}, 1.0, 0.0)[0] == Catch::Approx(0.375));
  // at the switch time itself the pre-switch side applies
  CHECK(switching_rhs(Vec{2.0}, 0.0, 0.0) == Vec{-2.0});
}

TEST_CASE("switching source routes to pre and post functions") {
  auto src = RhsSource::switching_source(
      [](const Vec& x, double) { return Vec{-x[0]}; },
      [](const Vec& x, double) { return Vec{x[0] * (1.0 - x[0] * x[0])}; }, 0.0,
      1);
  CHECK(src.eval(Vec{2.0}, -1.0) == Vec{-2.0});
  CHECK(src.eval(Vec{0.5}, 1.0)[0] == Catch::Approx(0.375));
}

TEST_CASE("velocity magnitude series") {
  SECTION("zero field gives all zeros") {
    auto src = RhsSource::analytic_source(
        [](const Vec& x, double) { return Vec(x.size(), 0.0); }, 1);
    auto traj = integrate_trajectory(src, Vec{1.0}, 0.0, 1.0, 0.1);
    for (double v : velocity_magnitude_series(traj, src)) CHECK(v == 0.0);
  }
  SECTION("linear decay gives e^{-t}") {
    auto src = linear_decay_1d();
    auto traj = integrate_trajectory(src, Vec{1.0}, 0.0, 3.0, 1e-3);
    auto series = velocity_magnitude_series(traj, src);
    for (std::size_t i = 0; i < traj.times.size(); i += 250)
      CHECK(series[i] ==
            Catch::Approx(std::exp(-traj.times[i])).margin(1e-9));
  }
}

TEST_CASE("two-parameter semigroup property on grid-aligned times") {
  auto src = RhsSource::analytic_source(
      [](const Vec& x, double t) {
        return Vec{-x[0] + std::sin(t), 0.5 * x[0] - x[1]};
      },
      2);
  const Vec x0{1.0, -0.5};
  const double t0 = 0.0, t1 = 0.75, t2 = 2.0, dt = 0.01;
  auto full = integrate_trajectory(src, x0, t0, t2, dt);
  auto first = integrate_trajectory(src, x0, t0, t1, dt);
  auto second = integrate_trajectory(src, first.states.back(), t1, t2, dt);
  const Vec& a = full.states.back();
  const Vec& b = second.states.back();
  CHECK(std::fabs(a[0] - b[0]) < 1e-12);
  CHECK(std::fabs(a[1] - b[1]) < 1e-12);
}

TEST_CASE("continuity in initial conditions") {
  auto src = linear_decay_1d();
  const double t_end = 2.0;
  double prev_gap = 1.0;
  for (double delta : {1e-2, 1e-4, 1e-6}) {
    auto a = integrate_trajectory(src, Vec{1.0}, 0.0, t_end, 0.01);
    auto b = integrate_trajectory(src, Vec{1.0 + delta}, 0.0, t_end, 0.01);
    const double gap = std::fabs(a.states.back()[0] - b.states.back()[0]);
    // contraction: gap ~ delta * e^{-t}, certainly below delta itself
    CHECK(gap < delta);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("trajectories leaving the grid box terminate with exit data") {
  auto g = make_custom_grid({Axis{-1.0, 1.0, 9}}, 0.0,
                            [](const Vec&) { return Vec{1.0}; });  // a = +1
  auto src = RhsSource::snapshot_source({g});
  try {
    integrate_trajectory(src, Vec{0.5}, 0.0, 5.0, 0.01);
    FAIL("expected TrajectoryExitError");
  } catch (const TrajectoryExitError& e) {
    CHECK(e.t == Catch::Approx(0.5).margin(0.02));
    CHECK(e.state[0] <= 1.0 + 1e-12);
    CHECK(e.state[0] >= 0.98);
    CHECK(e.partial.times.size() >= 2);
  }
}

TEST_CASE("dissipative field decreases |x|^2 at the declared rate") {
  // <a,x> <= -1 for |x| >= 1: d/dt |x|^2 <= -2 along the shell
  auto src = linear_decay_1d();
  const double r_star = 1.0;
  auto traj = integrate_trajectory(src, Vec{r_star + 1.0}, 0.0, 0.6, 1e-3);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double r_prev = norm(traj.states[i - 1]);
    if (r_prev < r_star) break;
    const double d_sq = norm2(traj.states[i]) - norm2(traj.states[i - 1]);
    CHECK(d_sq / (traj.times[i] - traj.times[i - 1]) <= -1.0 + 1e-6);
  }
}

TEST_CASE("frozen initial field serves times before the first snapshot") {
  auto g0 = make_custom_grid({Axis{-2.0, 2.0, 17}}, 0.0,
                             [](const Vec& z) { return Vec{-z[0]}; });
  auto g1 = make_custom_grid({Axis{-2.0, 2.0, 17}}, 1.0,
                             [](const Vec& z) { return Vec{-2.0 * z[0]}; });
  auto src = RhsSource::snapshot_source({g0, g1});
  CHECK(src.eval(Vec{1.0}, -5.0) == Vec{-1.0});
  CHECK(src.eval(Vec{1.0}, 0.5)[0] == Catch::Approx(-1.5));
  CHECK(src.eval(Vec{1.0}, 1.0) == Vec{-2.0});
  CHECK_THROWS_AS(src.eval(Vec{1.0}, 1.5), DomainError);
}

TEST_CASE("trajectory CSV has the documented shape") {
  auto traj = integrate_trajectory(linear_decay_1d(), Vec{1.0}, 0.0, 0.2, 0.1);
  const std::string csv = trajectory_to_csv(traj);
  CHECK(csv.rfind("t,x_1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}
