#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "ppf/builtin_curves.hpp"
#include "ppf/chebyshev.hpp"
#include "ppf/corridor.hpp"

using namespace ppf;

namespace {

struct StraightSetup {
  std::shared_ptr<const ParametricCurve> curve;
  FrameField frames;
  StraightSetup()
      : curve(std::make_shared<ParametricCurve>(builtin_curve("line"))),
        frames(ptfi_uniform(curve, 200)) {}
};

const StraightSetup& straight() {
  static StraightSetup s;
  return s;
}

// two planes of points at eta1 = +/- w along the straight path
std::vector<ProjectedObstacle> wall_obstacles(double w) {
  std::vector<ProjectedObstacle> obs;
  for (int i = 1; i < 10; ++i)
    for (int k = -4; k <= 4; ++k)
      for (double side : {-w, w}) {
        ProjectedObstacle ob;
        ob.xi = 0.1 * i;
        ob.x_perp = Vec2(side, 0.22 * k);
        obs.push_back(ob);
      }
  return obs;
}

}  // namespace

TEST_CASE("project_cloud: on-path, offset, and synthetic cylinder") {
  auto curve = std::make_shared<ParametricCurve>(builtin_curve("helix"));
  const FrameField frames = ptfi_uniform(curve, 2000);

  PointCloud cloud;
  cloud.points.push_back(curve->eval(1.0, 0));
  const FrameSample f = frame_at(frames, 2.0);
  cloud.points.push_back(curve->eval(2.0, 0) + 0.2 * f.e3());
  for (int i = 0; i < 60; ++i) {
    const double xi = 0.5 + 5.0 * i / 59.0;
    const double ang = 2.4 * i;
    const FrameSample g = frame_at(frames, xi);
    cloud.points.push_back(curve->eval(xi, 0) +
                           0.5 * (std::cos(ang) * g.e2() + std::sin(ang) * g.e3()));
  }

  const auto obs = project_cloud(*curve, frames, cloud);
  REQUIRE(obs.size() == cloud.points.size());
  CHECK(obs[0].x_perp.norm() < 1e-8);
  CHECK(obs[1].xi == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(obs[1].x_perp.x() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(obs[1].x_perp.y() == doctest::Approx(0.2).epsilon(1e-8));
  for (size_t i = 2; i < obs.size(); ++i)
    CHECK(obs[i].x_perp.norm() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("project_cloud: drops clamped and far points with counts") {
  const auto& s = straight();
  PointCloud cloud;
  cloud.points.push_back(Vec3(0.5, 0.1, 0.0));   // keep
  cloud.points.push_back(Vec3(2.0, 0.1, 0.0));   // beyond the end -> clamped
  cloud.points.push_back(Vec3(0.5, 5.0, 0.0));   // too far
  ProjectOptions opt;
  opt.max_radius = 1.0;
  ProjectStats stats;
  const auto obs = project_cloud(*s.curve, s.frames, cloud, opt, &stats);
  CHECK(obs.size() == 1);
  CHECK(stats.dropped_clamped == 1);
  CHECK(stats.dropped_radius == 1);
}

TEST_CASE("ellipse_at: circle, aligned ellipse, off-center") {
  EllipseCorridor c;
  c.degree = 0;
  c.xi0 = 0.0;
  c.xi1 = 1.0;
  c.wrapper_radius = 2.0;
  c.cE = Eigen::MatrixXd::Zero(3, 1);
  c.dE = Eigen::MatrixXd::Zero(2, 1);

  c.cE << 1.0, 0.0, 1.0;  // E = I
  EllipseSection s = ellipse_at(c, 0.5);
  CHECK(s.center.norm() < 1e-14);
  CHECK(s.axes.x() == doctest::Approx(1.0));
  CHECK(s.axes.y() == doctest::Approx(1.0));

  c.cE.col(0) << 4.0, 0.0, 1.0;  // E = diag(4, 1)
  s = ellipse_at(c, 0.2);
  CHECK(s.axes.x() == doctest::Approx(1.0));
  CHECK(s.axes.y() == doctest::Approx(0.5));

  c.cE.col(0) << 1.0, 0.0, 1.0;
  c.dE.col(0) << 1.0, 0.0;  // complete the square: center (1/2, 0)
  s = ellipse_at(c, 0.8);
  CHECK(s.center.x() == doctest::Approx(0.5));
  CHECK(s.axes.x() == doctest::Approx(std::sqrt(1.25)));

  c.cE.col(0) << -1.0, 0.0, 1.0;  // not positive definite
  CHECK_THROWS_AS(ellipse_at(c, 0.5), CorridorError);
}

TEST_CASE("generate: wrapper-only corridor is the wrapper circle") {
  const auto& s = straight();
  const EllipseCorridor c =
      generate(*s.curve, s.frames, {}, 3, 40, /*wrapper_radius=*/0.8);
  for (double xi : {0.1, 0.35, 0.6, 0.9}) {
    const EllipseSection e = ellipse_at(c, xi);
    CHECK(e.axes.x() == doctest::Approx(0.8).epsilon(0.02));
    CHECK(e.axes.y() == doctest::Approx(0.8).epsilon(0.02));
    CHECK(e.center.norm() < 1e-6);
  }
}

TEST_CASE("generate: straight path between walls") {
  const auto& s = straight();
  const double w = 0.3;
  const EllipseCorridor c =
      generate(*s.curve, s.frames, wall_obstacles(w), 3, 40, 0.9);
  for (double xi : {0.2, 0.5, 0.8}) {
    const EllipseSection e = ellipse_at(c, xi);
    // slab half-width w in e2, wrapper 0.9 in e3
    CHECK(e.axes.y() == doctest::Approx(w).epsilon(0.02));
    CHECK(e.axes.x() == doctest::Approx(0.9).epsilon(0.02));
  }
  // every generating obstacle certified outside
  for (const auto& ob : wall_obstacles(w))
    CHECK(c.boundary_residual(ob.xi, ob.x_perp) >= 1.0 - 1e-8);
}

TEST_CASE("generate: infeasible when an obstacle sits on the path") {
  const auto& s = straight();
  ProjectedObstacle on_path;
  on_path.xi = 0.5;
  on_path.x_perp = Vec2::Zero();
  CHECK_THROWS_AS(generate(*s.curve, s.frames, {on_path}, 2, 24, 0.5),
                  CorridorError);
}

TEST_CASE("generate: volume is monotone in the polynomial degree") {
  const auto& s = straight();
  // single blocking blob above the path plus walls
  std::vector<ProjectedObstacle> obs = wall_obstacles(0.45);
  for (int k = 0; k < 8; ++k) {
    ProjectedObstacle ob;
    ob.xi = 0.5 + 0.01 * k;
    ob.x_perp = Vec2(0.05, 0.2 + 0.02 * k);
    obs.push_back(ob);
  }
  double prev = 0.0;
  for (int degree : {3, 5, 7, 9}) {
    const EllipseCorridor c = generate(*s.curve, s.frames, obs, degree, 48, 0.9);
    const double v = volume(c, *s.curve, 2000);
    CHECK(v >= prev - 1e-6);
    prev = v;
  }
}

TEST_CASE("generate: cross-section coefficients are differentiable") {
  const auto& s = straight();
  const EllipseCorridor c =
      generate(*s.curve, s.frames, wall_obstacles(0.35), 5, 48, 0.8);
  const double h = 1e-5;
  for (double xi : {0.3, 0.62}) {
    // analytic Chebyshev derivative vs central differences
    const double t = c.normalized(xi);
    const double dt_dxi = 2.0 / (c.xi1 - c.xi0);
    for (int row = 0; row < 3; ++row) {
      const double an = chebyshev_eval_derivative(c.cE.row(row), t) * dt_dxi;
      const double fd = (chebyshev_eval(c.cE.row(row), c.normalized(xi + h)) -
                         chebyshev_eval(c.cE.row(row), c.normalized(xi - h))) /
                        (2.0 * h);
      CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("generate_planar: walls give constant bounds") {
  auto curve = std::make_shared<ParametricCurve>(builtin_curve("line2d"));
  const FrameField frames = ptfi_uniform(curve, 100);
  std::vector<ProjectedObstacle> obs;
  for (int i = 0; i <= 10; ++i)
    for (double side : {-0.3, 0.3}) {
      ProjectedObstacle ob;
      ob.xi = 0.1 * i;
      ob.x_perp = Vec2(side, 0.0);
      obs.push_back(ob);
    }
  const PlanarCorridor c = generate_planar(*curve, frames, obs, 0, 16, 1.0);
  for (double xi : {0.0, 0.4, 1.0}) {
    CHECK(c.eval_upper(xi) == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(c.eval_lower(xi) == doctest::Approx(-0.3).epsilon(1e-6));
  }
}

TEST_CASE("generate_planar: single obstacle dents the upper bound") {
  auto curve = std::make_shared<ParametricCurve>(builtin_curve("line2d"));
  const FrameField frames = ptfi_uniform(curve, 100);
  ProjectedObstacle ob;
  ob.xi = 0.5;
  ob.x_perp = Vec2(0.2, 0.0);
  const PlanarCorridor c = generate_planar(*curve, frames, {ob}, 6, 40, 0.6);
  CHECK(c.eval_upper(0.5) <= 0.2 + 1e-9);
  CHECK(c.eval_upper(0.02) >= 0.5);  // recovers toward the wrapper
  CHECK(c.eval_lower(0.5) == doctest::Approx(-0.6).epsilon(1e-6));

  ProjectedObstacle blocking;
  blocking.xi = 0.4;
  blocking.x_perp = Vec2::Zero();
  CHECK_THROWS_AS(generate_planar(*curve, frames, {blocking}, 2, 16, 0.6),
                  CorridorError);
}

TEST_CASE("contains: path points inside, generating obstacles outside") {
  const auto& s = straight();
  const auto obs = wall_obstacles(0.3);
  const EllipseCorridor c = generate(*s.curve, s.frames, obs, 3, 40, 0.9);
  CHECK(contains(c, *s.curve, s.frames, Vec3(0.5, 0, 0)));
  CHECK(contains(c, *s.curve, s.frames, Vec3(0.5, 0.0, 0.5)));
  CHECK_FALSE(contains(c, *s.curve, s.frames, Vec3(0.5, 0.3, 0.0)));

  // dense grid agreement with the reported geometry
  const EllipseSection e = ellipse_at(c, 0.5);
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j) {
      const Vec2 x(0.99 * e.center.x() + 0.9 * e.axes.y() * i / 5.0,
                   0.9 * e.axes.x() * j / 5.0);
      const bool geometric =
          (x - e.center).dot(e.E * (x - e.center)) <
          (1.0 + 0.25 * e.d.dot(e.E.inverse() * e.d)) * (1.0 - 1e-9);
      const bool member = c.boundary_residual(0.5, x) <= 1.0 - 1e-9;
      CHECK(geometric == member);
    }
}

TEST_CASE("volume: straight corridors with known cross-sections") {
  const auto& s = straight();
  EllipseCorridor c;
  c.degree = 0;
  c.xi0 = 0.0;
  c.xi1 = 1.0;
  c.wrapper_radius = 2.0;
  c.cE = Eigen::MatrixXd::Zero(3, 1);
  c.dE = Eigen::MatrixXd::Zero(2, 1);
  c.cE << 1.0, 0.0, 1.0;
  CHECK(volume(c, *s.curve, 500) == doctest::Approx(M_PI).epsilon(1e-9));
  c.cE.col(0) << 4.0, 0.0, 1.0;
  CHECK(volume(c, *s.curve, 500) == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("volume agrees with Monte-Carlo containment") {
  const auto& s = straight();
  const EllipseCorridor c =
      generate(*s.curve, s.frames, wall_obstacles(0.35), 5, 48, 0.8);
  const double v = volume(c, *s.curve, 4000);

  std::mt19937 rng(71u);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ue(-0.8, 0.8);
  const int n = 400000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const double xi = ux(rng);
    const Vec2 x(ue(rng), ue(rng));
    if (c.boundary_residual(xi, x) <= 1.0) ++inside;
  }
  const double mc = double(inside) / n * 1.0 * 1.6 * 1.6;  // sigma = 1
  CHECK(std::abs(mc - v) / v < 0.01);
}

TEST_CASE("corridor json round trips") {
  const auto& s = straight();
  const EllipseCorridor c =
      generate(*s.curve, s.frames, wall_obstacles(0.35), 4, 40, 0.8);
  const EllipseCorridor back = corridor_from_json(corridor_to_json(c));
  CHECK(back.degree == c.degree);
  CHECK((back.cE - c.cE).norm() == 0.0);
  CHECK((back.dE - c.dE).norm() == 0.0);

  auto c2d = std::make_shared<ParametricCurve>(builtin_curve("line2d"));
  const FrameField f2 = ptfi_uniform(c2d, 50);
  const PlanarCorridor pc = generate_planar(*c2d, f2, {}, 3, 20, 0.4);
  const PlanarCorridor pback = planar_corridor_from_json(planar_corridor_to_json(pc));
  CHECK((pback.lower - pc.lower).norm() == 0.0);
  CHECK((pback.upper - pc.upper).norm() == 0.0);
}

TEST_CASE("cloud parsing from csv and json") {
  const PointCloud a = cloud_from_csv("0,1\n2,3,4\n");
  REQUIRE(a.points.size() == 2);
  CHECK(a.points[0] == Vec3(0, 1, 0));
  CHECK(a.points[1] == Vec3(2, 3, 4));
  const PointCloud b = cloud_from_json(nlohmann::json::parse("[[1,2],[3,4,5]]"));
  REQUIRE(b.points.size() == 2);
  CHECK(b.points[1] == Vec3(3, 4, 5));
}
