#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "plastica/attractor.hpp"

using namespace plastica;

namespace {

// O(|A||B|) scan, the oracle for the kd-tree route.
double brute_directed(const std::vector<Vec>& from, const std::vector<Vec>& to) {
  double worst2 = 0.0;
  for (const Vec& a : from) {
    double best2 = std::numeric_limits<double>::infinity();
    for (const Vec& b : to) best2 = std::min(best2, dist2(a, b));
    worst2 = std::max(worst2, best2);
  }
  return std::sqrt(worst2);
}

RhsSource linear_decay() {
  return RhsSource::analytic_source(
      [](const Vec& x, double) { return Vec{-x[0]}; }, 1);
}

RhsSource decay_plus_sin() {
  return RhsSource::analytic_source(
      [](const Vec& x, double t) { return Vec{-x[0] + std::sin(t)}; }, 1);
}

RhsSource switching_counterexample() {
  return RhsSource::switching_source(
      [](const Vec& x, double) { return Vec{-x[0]}; },
      [](const Vec& x, double) { return Vec{x[0] * (1.0 - x[0] * x[0])}; }, 0.0,
      1);
}

// the unique bounded entire solution of dx/dt = -x + sin t
double entire_solution(double t) { return 0.5 * (std::sin(t) - std::cos(t)); }

}  // namespace

TEST_CASE("Hausdorff distance of identical singletons is zero") {
  CHECK(hausdorff_distance({Vec{0.0}}, {Vec{0.0}}) == 0.0);
}

TEST_CASE("directed and full Hausdorff differ on nested sets") {
  const std::vector<Vec> a{Vec{0.0}};
  const std::vector<Vec> b{Vec{0.0}, Vec{1.0}};
  CHECK(directed_hausdorff(a, b) == 0.0);
  CHECK(directed_hausdorff(b, a) == 1.0);
  CHECK(hausdorff_distance(a, b) == 1.0);
}

TEST_CASE("empty sets are rejected") {
  CHECK_THROWS_AS(hausdorff_distance({}, {Vec{0.0}}), Error);
}

TEST_CASE("kd-tree Hausdorff equals the brute-force scan") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t d = 1 + trial % 3;
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_int_distribution<int> sz(1, 120);
    std::vector<Vec> a(sz(rng)), b(sz(rng));
    for (auto& p : a) {
      p.resize(d);
      for (auto& c : p) c = u(rng);
    }
    for (auto& p : b) {
      p.resize(d);
      for (auto& c : p) c = u(rng);
    }
    REQUIRE(directed_hausdorff(a, b) == brute_directed(a, b));
    REQUIRE(hausdorff_distance(a, b) ==
            std::max(brute_directed(a, b), brute_directed(b, a)));
  }
}

TEST_CASE("set estimate covers its points with minimal boxes") {
  auto e = SetEstimate::from_points({Vec{0.01}, Vec{0.09}, Vec{0.11}, Vec{-0.3}},
                                    0.1, 0.0);
  CHECK(e.boxes.size() == 3);  // bins [0,0.1), [0.1,0.2), [-0.3,-0.2)
  const Json j = e.to_json();
  const SetEstimate back = SetEstimate::from_json(j);
  CHECK(back.boxes == e.boxes);
  CHECK(back.points == e.points);
  CHECK(back.box_size == e.box_size);
  CHECK(back.t == e.t);
}

TEST_CASE("autonomous contraction pulls back to the origin") {
  CloudOptions opts;
  opts.cloud_n = 128;
  opts.eps = 0.01;
  opts.dt = 0.01;
  auto sweep = pullback_attractor_estimate(linear_decay(), 2.0, 0.0,
                                           {-1.0, -2.0, -4.0, -6.0, -8.0, -10.0},
                                           opts);
  REQUIRE(sweep.converged);
  const auto& last = sweep.estimates.back();
  CHECK(directed_hausdorff(last.points, {Vec{0.0}}) <= opts.eps);
  // nested within the predecessor estimates
  for (std::size_t i = 1; i < sweep.estimates.size(); ++i)
    CHECK(sweep.nesting_defects[i] <= opts.eps);
}

TEST_CASE("switching system pulls back to the origin at t = 0") {
  CloudOptions opts;
  opts.cloud_n = 128;
  opts.eps = 0.02;
  opts.dt = 0.01;
  auto sweep = pullback_attractor_estimate(
      switching_counterexample(), 2.0, 0.0,
      {-1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0}, opts);
  REQUIRE(sweep.converged);
  CHECK(directed_hausdorff(sweep.estimates.back().points, {Vec{0.0}}) <=
        opts.eps);
}

TEST_CASE("pullback point of -x + sin t is the bounded entire solution") {
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.005;
  opts.dt = 0.005;
  for (double target : {0.0, 1.0, 2.5}) {
    auto sweep = pullback_attractor_estimate(
        decay_plus_sin(), 2.7, target,
        {target - 4.0, target - 8.0, target - 12.0, target - 16.0}, opts);
    REQUIRE(sweep.converged);
    for (const Vec& p : sweep.estimates.back().points)
      CHECK(p[0] == Catch::Approx(entire_solution(target)).margin(1e-3));
  }
}

TEST_CASE("non-invariant ball is detected with a witness") {
  auto expanding = RhsSource::analytic_source(
      [](const Vec& x, double) { return Vec{x[0]}; }, 1);
  CloudOptions opts;
  opts.cloud_n = 32;
  opts.dt = 0.01;
  CHECK_THROWS_AS(
      pullback_attractor_estimate(expanding, 1.0, 0.0, {-1.0, -2.0}, opts),
      InvarianceError);
}

TEST_CASE("forward limit set of a contraction is the origin") {
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.01;
  opts.dt = 0.01;
  opts.sample_cadence = 0.1;
  auto est = forward_limit_set_estimate(linear_decay(), 2.0, 0.0, 12.0, 20.0,
                                        opts);
  CHECK(directed_hausdorff(est.points, {Vec{0.0}}) <= opts.eps);
}

TEST_CASE("forward limit set of the switching system covers [-1, 1]") {
  CloudOptions opts;
  opts.cloud_n = 512;
  opts.eps = 0.02;
  opts.dt = 0.01;
  opts.sample_cadence = 0.05;
  auto est = forward_limit_set_estimate(switching_counterexample(), 2.0, 1.0,
                                        3.0, 30.0, opts);
  std::vector<Vec> probe;
  for (double x = -1.0; x <= 1.0 + 1e-12; x += 0.001) probe.push_back(Vec{x});
  CHECK(hausdorff_distance(est.points, probe) <= 0.05);
}

TEST_CASE("forward limit set of -x + sin t is the orbit band") {
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.02;
  opts.dt = 0.005;
  opts.sample_cadence = 0.02;
  auto est = forward_limit_set_estimate(decay_plus_sin(), 2.7, 0.0, 25.0, 45.0,
                                        opts);
  // oracle: one period of the closed-form entire solution
  std::vector<Vec> probe;
  for (double t = 0.0; t < 6.2832; t += 0.005)
    probe.push_back(Vec{entire_solution(t)});
  CHECK(hausdorff_distance(est.points, probe) <= 0.03);
}

TEST_CASE("forward attracting set grows with t0 and stays within the ball") {
  CloudOptions opts;
  opts.cloud_n = 512;
  opts.eps = 0.02;
  opts.dt = 0.01;
  opts.sample_cadence = 0.05;
  auto r = forward_attracting_set(switching_counterexample(), 2.0,
                                  {-2.0, 0.5, 1.0}, 2.0, 30.0, opts);
  for (double defect : r.monotonicity_defects) CHECK(defect <= 2.0 * opts.eps);
  for (const Vec& p : r.omega_star.points) CHECK(norm(p) <= 2.0 + 1e-6);
  std::vector<Vec> probe;
  for (double x = -1.0; x <= 1.0 + 1e-12; x += 0.001) probe.push_back(Vec{x});
  CHECK(hausdorff_distance(r.omega_star.points, probe) <= 0.05);
}

TEST_CASE("autonomous contraction: forward attracting set is the origin") {
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.01;
  opts.dt = 0.01;
  opts.sample_cadence = 0.1;
  auto r = forward_attracting_set(linear_decay(), 2.0, {0.0, 1.0}, 10.0, 20.0,
                                  opts);
  CHECK(directed_hausdorff(r.omega_star.points, {Vec{0.0}}) <= opts.eps);
}

TEST_CASE("forward attraction check separates pullback from forward limits") {
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.05;
  opts.dt = 0.01;
  opts.sample_cadence = 0.25;
  auto src = switching_counterexample();
  const auto cloud = ball_cloud(1, 2.0, 64);

  // evolving B* approaches the forward attracting set [-1, 1] ...
  std::vector<Vec> band;
  for (double x = -1.0; x <= 1.0 + 1e-12; x += 0.001) band.push_back(Vec{x});
  auto to_band = forward_attraction_check(
      src, SetEstimate::from_points(band, 0.02), {cloud}, 1.0, 25.0, opts);
  REQUIRE(to_band.attracted.size() == 1);
  CHECK(to_band.attracted[0]);

  // ... but not the pullback attractor {0}
  auto to_origin = forward_attraction_check(
      src, SetEstimate::from_points({Vec{0.0}}, 0.02), {cloud}, 1.0, 25.0,
      opts);
  CHECK_FALSE(to_origin.attracted[0]);
  for (std::size_t s = 0; s < to_origin.times.size(); ++s)
    if (to_origin.times[s] >= 5.0)
      CHECK(to_origin.directed_dist[0][s] >= 0.5);
}

TEST_CASE("attraction check on a contraction converges to the origin") {
  CloudOptions opts;
  opts.cloud_n = 32;
  opts.eps = 0.01;
  opts.dt = 0.01;
  opts.sample_cadence = 0.5;
  auto rep = forward_attraction_check(
      linear_decay(), SetEstimate::from_points({Vec{0.0}}, 0.01),
      {ball_cloud(1, 2.0, 32)}, 0.0, 15.0, opts);
  CHECK(rep.attracted[0]);
}

TEST_CASE("converged pullback estimate is invariant under the flow") {
  // evolve the estimate at t and re-estimate at t + delta: images agree
  CloudOptions opts;
  opts.cloud_n = 64;
  opts.eps = 0.005;
  opts.dt = 0.005;
  const double t = 0.0, delta = 1.0;
  auto src = decay_plus_sin();
  auto at_t = pullback_attractor_estimate(src, 2.7, t,
                                          {t - 6.0, t - 10.0, t - 14.0}, opts);
  auto at_later = pullback_attractor_estimate(
      src, 2.7, t + delta, {t - 5.0, t - 9.0, t - 13.0}, opts);
  REQUIRE(at_t.converged);
  REQUIRE(at_later.converged);
  std::vector<Vec> evolved;
  for (const Vec& p : at_t.estimates.back().points)
    evolved.push_back(
        integrate_trajectory(src, p, t, t + delta, opts.dt).states.back());
  CHECK(hausdorff_distance(evolved, at_later.estimates.back().points) <=
        2.0 * opts.eps);
}

TEST_CASE("sweep report CSV is well formed") {
  CloudOptions opts;
  opts.cloud_n = 16;
  opts.eps = 0.05;
  opts.dt = 0.01;
  auto sweep =
      pullback_attractor_estimate(linear_decay(), 2.0, 0.0, {-1.0, -2.0}, opts);
  const std::string csv = sweep_to_csv(sweep);
  CHECK(csv.rfind("t0,n_points,n_boxes,hausdorff_gap\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
