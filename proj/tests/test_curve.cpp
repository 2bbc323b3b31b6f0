#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "ppf/builtin_curves.hpp"
#include "ppf/curve.hpp"

using namespace ppf;

namespace {

ParametricCurve scaled_circle(double radius) {
  AnalyticCurve ac = analytic_curve("circle");
  AnalyticCurve scaled = ac;
  scaled.jets = [ac, radius](double t) {
    auto jet = ac.jets(t);
    for (auto& v : jet) v *= radius;
    return jet;
  };
  return to_parametric(scaled, 400, 4);
}

ParametricCurve random_c4_curve(unsigned seed, int n_points = 12) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  WaypointSet wps;
  wps.dimension = 3;
  for (int i = 0; i < n_points; ++i) {
    const double t = 2.0 * M_PI * double(i) / (n_points - 1);
    wps.points.push_back(Vec3(std::cos(t) + jitter(rng),
                              std::sin(t) + jitter(rng), 0.3 * t + jitter(rng)));
  }
  return interpolate(wps, 4);
}

}  // namespace

TEST_CASE("eval: straight line derivative") {
  const ParametricCurve line = builtin_curve("line");
  CHECK((line.eval(0.3, 1) - Vec3(1, 0, 0)).norm() < 1e-12);
  CHECK((line.eval(0.3, 0) - Vec3(0.3, 0, 0)).norm() < 1e-12);
}

TEST_CASE("eval: circle second derivative at theta=0") {
  const ParametricCurve circle = builtin_curve("circle");
  const Vec3 dd = circle.eval(0.0, 2);
  CHECK(dd.x() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(std::abs(dd.y()) < 1e-9);
}

TEST_CASE("eval: clamped cubic through (0,0),(1,1) with zero end slopes") {
  // Hermite basis by hand: p(s) = 3s^2 - 2s^3, so p(1/2) = 1/2.
  WaypointSet wps;
  wps.dimension = 2;
  wps.points = {Vec3(0, 0, 0), Vec3(1, 1, 0)};
  ClampedEnds clamp;
  clamp.start = {Vec3::Zero()};
  clamp.end = {Vec3::Zero()};
  const ParametricCurve c = interpolate(wps, 1, clamp);
  CHECK(c.eval(0.5, 0).y() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((c.eval(0.0, 1)).norm() < 1e-12);
  CHECK((c.eval(1.0, 1)).norm() < 1e-12);
}

TEST_CASE("eval: theta outside the domain") {
  const ParametricCurve line = builtin_curve("line");
  CHECK_THROWS_AS(line.eval(1.5, 0), std::domain_error);
  CHECK_THROWS_AS(line.eval(-0.1, 0), std::domain_error);
}

TEST_CASE("eval: right-continuous at interior knots") {
  // piecewise-linear corner: left slope (1,0), right slope (0,1)
  ParametricCurve c(2, {0.0, 1.0, 2.0},
                    {(Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished(),
                     (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished()},
                    0);
  CHECK((c.eval(1.0, 1) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((c.eval_one_sided(1.0, 1, true) - Vec3(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("parametric_speed: helix, line, scaled line") {
  const ParametricCurve helix = builtin_curve("helix");
  for (double t : {0.1, 1.0, 4.0})
    CHECK(helix.parametric_speed(t) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  CHECK(builtin_curve("line").parametric_speed(0.5) == doctest::Approx(1.0));

  std::vector<double> th = {0.0, 1.0};
  std::vector<Vec3> vals = {Vec3(0, 0, 0), Vec3(2, 0, 0)};
  std::vector<std::vector<Vec3>> derivs = {{Vec3(2, 0, 0), Vec3(2, 0, 0)}};
  const ParametricCurve scaled = hermite_curve(2, th, vals, derivs, 1);
  CHECK(scaled.parametric_speed(0.3) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("parametric_speed: degenerate parameterization") {
  // quadratic with vanishing derivative at the start
  ParametricCurve c(2, {0.0, 1.0},
                    {(Eigen::MatrixXd(2, 3) << 0, 0, 1, 0, 0, 0).finished()}, 0);
  CHECK_THROWS(c.parametric_speed(0.0));
}

TEST_CASE("arc_length: line, circumference, helix closed form") {
  CHECK(builtin_curve("line").arc_length(1.0) ==
        doctest::Approx(1.0).epsilon(1e-10));

  const ParametricCurve circle2 = scaled_circle(2.0);
  CHECK(circle2.arc_length(2.0 * M_PI) ==
        doctest::Approx(4.0 * M_PI).epsilon(1e-9));

  const ParametricCurve helix = builtin_curve("helix");
  CHECK(helix.arc_length(2.0 * M_PI) ==
        doctest::Approx(2.0 * M_PI * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("arc_length: monotone, above chord length") {
  const ParametricCurve c = random_c4_curve(7);
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = c.theta_max() * double(i) / 20.0;
    const double l = c.arc_length(t);
    CHECK(l >= prev - 1e-12);
    prev = l;
  }
  const double chord =
      (c.eval(c.theta_max(), 0) - c.eval(c.theta_min(), 0)).norm();
  CHECK(c.arc_length(c.theta_max()) >= chord - 1e-9);
}

TEST_CASE("interpolate: two points give a straight constant-speed segment") {
  WaypointSet wps;
  wps.dimension = 2;
  wps.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const ParametricCurve c = interpolate(wps, 1);
  for (double t : {0.0, 0.25, 0.7, 1.0}) {
    CHECK(c.parametric_speed(t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(c.eval(t, 0).y()) < 1e-14);
  }
}

TEST_CASE("interpolate: collinear points stay flat") {
  WaypointSet wps;
  wps.dimension = 2;
  for (int i = 0; i < 5; ++i)
    wps.points.push_back(Vec3(0.31 * i, 0.17 * i, 0.0));
  const ParametricCurve c = interpolate(wps, 2);
  for (int i = 0; i <= 50; ++i) {
    const double t = double(i) / 50.0;
    const Vec3 u = c.eval(t, 1), a = c.eval(t, 2);
    const double kappa = u.cross(a).norm() / std::pow(u.norm(), 3);
    CHECK(kappa < 1e-8);
  }
}

TEST_CASE("interpolate: waypoints reproduced, continuity certified") {
  std::mt19937 rng(21u);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int continuity : {0, 1, 2, 3, 4}) {
    WaypointSet wps;
    wps.dimension = 3;
    for (int i = 0; i < 9; ++i)
      wps.points.push_back(Vec3(i + 0.3 * d(rng), d(rng), d(rng)));
    const ParametricCurve c = interpolate(wps, continuity);
    CHECK(c.max_knot_defect() < 1e-9);
    for (size_t i = 0; i < wps.points.size(); ++i) {
      const double t = c.knots()[i];
      CHECK((c.eval(t, 0) - wps.points[i]).norm() < 1e-10);
    }
  }
}

TEST_CASE("interpolate: not enough waypoints for the requested class") {
  WaypointSet wps;
  wps.dimension = 2;
  wps.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  CHECK_THROWS_AS(interpolate(wps, 3), std::invalid_argument);
}

TEST_CASE("derivatives agree with central finite differences") {
  const ParametricCurve c = random_c4_curve(3);
  const double h = 4e-6;
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> pick(0.05, 0.95);
  for (int trial = 0; trial < 25; ++trial) {
    double t = c.theta_min() + pick(rng) * (c.theta_max() - c.theta_min());
    // keep clear of knots so the FD stencil stays inside one segment
    for (double k : c.knots())
      if (std::abs(t - k) < 2 * h) t += 4 * h;
    for (int order = 1; order <= 4; ++order) {
      const Vec3 fd =
          (c.eval(t + h, order - 1) - c.eval(t - h, order - 1)) / (2.0 * h);
      const Vec3 an = c.eval(t, order);
      CHECK((fd - an).norm() < 1e-6 * std::max(1.0, an.norm()));
    }
  }
}

TEST_CASE("json round-trip is exact") {
  const ParametricCurve c = random_c4_curve(11);
  const nlohmann::json j = curve_to_json(c);
  const ParametricCurve back = curve_from_json(j);
  CHECK(back.dimension() == c.dimension());
  CHECK(back.continuity_class() == c.continuity_class());
  for (double t : {0.0, 0.37, 0.82, 1.0}) {
    const double tt = c.theta_min() + t * (c.theta_max() - c.theta_min());
    CHECK((back.eval(tt, 0) - c.eval(tt, 0)).norm() == 0.0);
    CHECK((back.eval(tt, 3) - c.eval(tt, 3)).norm() == 0.0);
  }
}

TEST_CASE("waypoints from csv") {
  const WaypointSet wps = waypoints_from_csv("0,0\n1.5,2\n3,1\n");
  CHECK(wps.dimension == 2);
  REQUIRE(wps.points.size() == 3);
  CHECK(wps.points[1] == Vec3(1.5, 2, 0));

  CHECK_THROWS(waypoints_from_csv("0,0\n0,0\n"));  // identical consecutive
  const WaypointSet withp = waypoints_from_csv("0.0,1,2\n0.5,3,4\n", true);
  CHECK(withp.params == std::vector<double>{0.0, 0.5});
}

TEST_CASE("builtin curves track their analytic definitions") {
  for (const char* name : {"sin2d", "coil3d", "sinref", "contcurve"}) {
    const AnalyticCurve ac = analytic_curve(name);
    const ParametricCurve c = builtin_curve(name);
    for (int i = 1; i < 7; ++i) {
      const double t = ac.theta0 + (ac.theta1 - ac.theta0) * i / 7.0;
      const auto jet = ac.jets(t);
      for (int order = 0; order <= 2; ++order)
        CHECK((c.eval(t, order) - jet[order]).norm() <
              1e-9 * std::max(1.0, jet[order].norm()));
    }
  }
}
