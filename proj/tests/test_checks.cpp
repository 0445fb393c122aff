#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "plastica/checks.hpp"

using namespace plastica;

namespace {

RhsSource linear_decay(std::size_t d) {
  return RhsSource::analytic_source(
      [](const Vec& x, double) { return scaled(x, -1.0); }, d);
}

PlasticRule custom_rule(std::function<Vec(const Vec&, const Vec&, const Vec&, double)> c) {
  PlasticRule r;
  r.kind = PlasticRule::Kind::direct_custom;
  r.custom_c = std::move(c);
  return r;
}

}  // namespace

TEST_CASE("A2 passes for the linear contraction with R* = 1") {
  auto rep = check_dissipativity_A2(linear_decay(2), 1.0, {0.0, 1.0, 2.0});
  CHECK(rep.passed);
  CHECK(rep.worst_value <= -1.0 + 1e-3);
  CHECK(rep.worst_value == Catch::Approx(-1.0).margin(0.02));
  CHECK(rep.name == "A2");
}

TEST_CASE("A2 fails for the expanding field and carries a witness") {
  auto expanding = RhsSource::analytic_source(
      [](const Vec& x, double) { return x; }, 2);
  auto rep = check_dissipativity_A2(expanding, 1.0, {0.0});
  CHECK_FALSE(rep.passed);
  const Vec x = rep.worst_witness.at("x").get<Vec>();
  const double t = rep.worst_witness.at("t").get<double>();
  CHECK(dot(expanding.eval(x, t), x) == rep.worst_value);
  CHECK(norm(x) >= 1.0);
  CHECK(norm(x) <= 2.0 + 1e-12);
}

TEST_CASE("A2 witness is reproducible on a field snapshot source") {
  auto grid = make_custom_grid(
      {Axis{-2.5, 2.5, 41}}, 0.0,
      [](const Vec& z) { return Vec{-z[0] + 0.1 * std::sin(3.0 * z[0])}; });
  auto src = RhsSource::snapshot_source({grid});
  auto rep = check_dissipativity_A2(src, 1.0, {0.0});
  const Vec x = rep.worst_witness.at("x").get<Vec>();
  const double t = rep.worst_witness.at("t").get<double>();
  CHECK(dot(src.eval(x, t), x) == rep.worst_value);
  CHECK(rep.passed == (rep.worst_value <= -1.0 + rep.tolerance));
}

TEST_CASE("doubling the sample count never decreases the reported worst") {
  auto wiggle = RhsSource::analytic_source(
      [](const Vec& x, double t) {
        return Vec{-x[0] + 0.3 * std::sin(5.0 * x[0] + t)};
      },
      1);
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t n : {64, 128, 256, 512, 1024}) {
    CheckOptions opts;
    opts.n_samples = n;
    const auto rep = check_dissipativity_A2(wiggle, 1.0, {0.0, 0.7}, opts);
    CHECK(rep.worst_value >= prev);
    prev = rep.worst_value;
  }
}

TEST_CASE("growth check: zero rule fits alpha = 0, beta = 0") {
  auto rule = custom_rule([](const Vec& a, const Vec&, const Vec&, double) {
    return Vec(a.size(), 0.0);
  });
  RuleDomain dom;
  dom.d = 2;
  auto rep = check_growth_C2(rule, dom);
  CHECK(rep.passed);
  CHECK(rep.details.at("alpha").get<double>() == 0.0);
  CHECK(rep.details.at("beta").get<double>() == 0.0);
}

TEST_CASE("growth check: identity rule fits alpha = 1, beta = 0") {
  auto rule = custom_rule(
      [](const Vec& a, const Vec&, const Vec&, double) { return a; });
  RuleDomain dom;
  dom.d = 1;
  auto rep = check_growth_C2(rule, dom);
  CHECK(rep.passed);
  CHECK(rep.details.at("alpha").get<double>() == Catch::Approx(1.0).margin(1e-9));
  CHECK(rep.details.at("beta").get<double>() ==
        Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("growth check: potential rule satisfies the analytic constants") {
  PlasticRule rule;
  rule.kind = PlasticRule::Kind::potential_linear;
  rule.k = 0.5;
  rule.sigma = 1.0;
  const double supG = gaussian_grad_sup(rule.sigma);
  RuleDomain dom;
  dom.d = 1;
  dom.a_radius = 4.0;
  dom.x_radius = 3.0;
  dom.y_radius = 2.0;
  CheckOptions opts;
  opts.n_samples = 4096;
  opts.tolerance = 1e-12;
  auto rep = check_growth_C2(
      rule, dom, opts,
      std::make_pair(-rule.k / 2.0, supG * supG / (2.0 * rule.k)));
  CHECK(rep.passed);
}

TEST_CASE("growth check flags superquadratic rules") {
  auto rule = custom_rule([](const Vec& a, const Vec&, const Vec&, double) {
    return scaled(a, norm2(a));  // <a,c> = |a|^4
  });
  RuleDomain dom;
  dom.d = 1;
  dom.a_radius = 5.0;
  auto rep = check_growth_C2(rule, dom);
  CHECK_FALSE(rep.passed);
  CHECK(rep.details.at("growth_exponent").get<double>() > 3.0);
}

TEST_CASE("C4 passes for inward rules and fails for outward ones") {
  auto inward = custom_rule([](const Vec&, const Vec& z, const Vec&, double) {
    return scaled(z, -0.7);
  });
  RuleDomain dom;
  dom.d = 2;
  dom.x_radius = 3.0;
  auto rep = check_C4(inward, 1.0, dom);
  CHECK(rep.passed);

  auto outward = custom_rule([](const Vec&, const Vec& z, const Vec&, double) {
    return z;
  });
  auto bad = check_C4(outward, 1.0, dom);
  CHECK_FALSE(bad.passed);
  const Vec x = bad.worst_witness.at("x").get<Vec>();
  CHECK(norm(x) >= 1.0 - 1e-12);
  CHECK(dot(x, x) == Catch::Approx(bad.worst_value));
}

TEST_CASE("C4 reports the potential rule at tolerance") {
  PlasticRule rule;
  rule.kind = PlasticRule::Kind::potential_linear;
  rule.k = 0.5;
  rule.sigma = 1.0;
  RuleDomain dom;
  dom.d = 1;
  dom.a_radius = 2.0;
  dom.x_radius = 3.0;
  dom.y_radius = 2.0;
  auto rep = check_C4(rule, 1.5, dom);
  // the worst sample is reproducible regardless of the verdict
  const auto c = rule_c(rule);
  const Vec a = rep.worst_witness.at("a").get<Vec>();
  const Vec x = rep.worst_witness.at("x").get<Vec>();
  const Vec y = rep.worst_witness.at("y").get<Vec>();
  const double t = rep.worst_witness.at("t").get<double>();
  CHECK(dot(c(a, x, y, t), x) == rep.worst_value);
  CHECK(rep.passed == (rep.worst_value <= rep.tolerance));
}

TEST_CASE("symmetry check: gradient fields pass, rotations fail") {
  auto gradient_field = make_custom_grid(
      {Axis{-1.0, 1.0, 9}, Axis{-1.0, 1.0, 9}}, 0.0,
      [](const Vec& z) { return Vec{-z[0], -z[1]}; });
  auto ok = check_symmetry_potential(gradient_field);
  CHECK(ok.passed);
  CHECK(ok.worst_value == Catch::Approx(0.0).margin(1e-13));

  auto rotation = make_custom_grid(
      {Axis{-1.0, 1.0, 9}, Axis{-1.0, 1.0, 9}}, 0.0,
      [](const Vec& z) { return Vec{-z[1], z[0]}; });
  auto bad = check_symmetry_potential(rotation);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_value == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("symmetry defect of an evolved potential field shrinks as h^2") {
  PlasticRule rule;
  rule.kind = PlasticRule::Kind::potential_linear;
  rule.k = 0.5;
  rule.sigma = 1.0;
  auto defect_at = [&](std::size_t n) {
    auto path = make_deterministic_path(
        std::function<Vec(double)>(
            [](double t) { return Vec{std::sin(t), std::cos(t)}; }),
        0.0, 2.0, 0.01);
    auto g = make_potential_grid(
        {Axis{-2.0, 2.0, n}, Axis{-2.0, 2.0, n}}, 0.0,
        [](const Vec&) { return 0.0; },
        [](const Vec& z) { return Vec(z.size(), 0.0); }, rule);
    for (int i = 0; i < 100; ++i) g = step_field(g, rule, path, 0.02);
    return check_symmetry_potential(g).worst_value;
  };
  const double d1 = defect_at(11);
  const double d2 = defect_at(21);
  CHECK(d1 / d2 > 3.0);
  CHECK(d1 / d2 < 6.0);
}

TEST_CASE("frozen rule preserves dissipativity trivially") {
  auto rule = custom_rule([](const Vec& a, const Vec&, const Vec&, double) {
    return Vec(a.size(), 0.0);
  });
  auto a0 = make_custom_grid({Axis{-2.5, 2.5, 21}}, 0.0,
                             [](const Vec& z) { return Vec{-2.0 * z[0]}; });
  auto path = make_deterministic_path(
      std::function<double(double)>([](double) { return 0.0; }), 0.0, 4.0, 0.01);
  auto rep = check_dissipativity_preservation(rule, a0, path, 4.0, 1.0);
  CHECK(rep.passed);
}

TEST_CASE("inward rule preserves dissipativity along the evolution") {
  auto rule = custom_rule([](const Vec&, const Vec& z, const Vec&, double) {
    return scaled(z, -0.2);
  });
  auto a0 = make_custom_grid({Axis{-2.5, 2.5, 21}}, 0.0,
                             [](const Vec& z) { return Vec{-2.0 * z[0]}; });
  auto path = make_deterministic_path(
      std::function<double(double)>([](double) { return 0.0; }), 0.0, 4.0, 0.01);
  auto rep = check_dissipativity_preservation(rule, a0, path, 4.0, 1.0);
  CHECK(rep.passed);
}

TEST_CASE("outward rule eventually breaks dissipativity with a witness time") {
  auto rule = custom_rule([](const Vec&, const Vec& z, const Vec&, double) {
    return scaled(z, 0.5);
  });
  auto a0 = make_custom_grid({Axis{-2.5, 2.5, 21}}, 0.0,
                             [](const Vec& z) { return Vec{-2.0 * z[0]}; });
  auto path = make_deterministic_path(
      std::function<double(double)>([](double) { return 0.0; }), 0.0, 4.0, 0.01);
  auto rep = check_dissipativity_preservation(rule, a0, path, 4.0, 1.0);
  CHECK_FALSE(rep.passed);
  const double t_fail = rep.details.at("first_failure_t").get<double>();
  // a(z,t) = (-2 + 0.5 t) z crosses the -1 bound near t = 2
  CHECK(t_fail > 1.9);
  CHECK(t_fail < 2.9);
}

TEST_CASE("ball boundary flow check accepts the switching system on [-2,2]") {
  auto src = RhsSource::switching_source(
      [](const Vec& x, double) { return Vec{-x[0]}; },
      [](const Vec& x, double) { return Vec{x[0] * (1.0 - x[0] * x[0])}; }, 0.0,
      1);
  auto rep = check_boundary_inward(src, 2.0, {-1.0, 0.0, 1.0, 5.0});
  CHECK(rep.passed);
  CHECK(rep.worst_value <= -4.0 + 1e-9);  // pre side: <-x,x> = -4
}

TEST_CASE("gradient consistency check validates an analytic pair") {
  auto f = [](const Vec& x, double t) {
    return Vec{-x[0] + std::sin(t) * x[1], x[0] * x[1]};
  };
  auto grad = [](const Vec& x, double t) {
    return std::vector<double>{-1.0, std::sin(t), x[1], x[0]};
  };
  auto rep = check_gradient_consistency_A1(f, grad, Vec{-1.0, -1.0},
                                           Vec{1.0, 1.0}, {0.0, 0.5});
  CHECK(rep.passed);
  CHECK(rep.worst_value < 1e-8);

  auto wrong_grad = [](const Vec&, double) {
    return std::vector<double>{-1.0, 0.0, 0.0, 0.0};
  };
  auto bad = check_gradient_consistency_A1(f, wrong_grad, Vec{-1.0, -1.0},
                                           Vec{1.0, 1.0}, {0.5});
  CHECK_FALSE(bad.passed);
}

TEST_CASE("smoothness surrogate accepts the potential rule in a and x") {
  PlasticRule rule;
  rule.kind = PlasticRule::Kind::potential_linear;
  rule.k = 0.5;
  rule.sigma = 1.0;
  RuleDomain dom;
  dom.d = 1;
  CheckOptions opts;
  opts.n_samples = 128;
  auto c1 = check_smoothness_increment(rule, dom, 0, opts);
  CHECK(c1.passed);
  CHECK(c1.name == "C1");
  auto c3 = check_smoothness_increment(rule, dom, 1, opts);
  CHECK(c3.passed);
  CHECK(c3.name == "C3");
}

TEST_CASE("check reports serialize with a fixed field order") {
  auto rep = check_dissipativity_A2(linear_decay(1), 1.0, {0.0});
  const Json j = rep.to_json();
  auto it = j.begin();
  CHECK(it.key() == "name");
  ++it;
  CHECK(it.key() == "domain");
  ++it;
  CHECK(it.key() == "n_samples");
  ++it;
  CHECK(it.key() == "worst_value");
  ++it;
  CHECK(it.key() == "worst_witness");
  ++it;
  CHECK(it.key() == "passed");
  ++it;
  CHECK(it.key() == "tolerance");
}
