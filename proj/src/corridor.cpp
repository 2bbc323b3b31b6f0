#include "ppf/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ppf/chebyshev.hpp"
#include "ppf/lp.hpp"
#include "ppf/spatial.hpp"

namespace ppf {
namespace {

constexpr double kDominanceMargin = 1e-6;
constexpr int kWrapperPoints = 16;

}  // namespace

std::vector<ProjectedObstacle> project_cloud(const ParametricCurve& curve,
                                             const FrameField& frames,
                                             const PointCloud& cloud,
                                             const ProjectOptions& options,
                                             ProjectStats* stats) {
  const double lo = curve.theta_min(), hi = curve.theta_max();
  const int ns = std::max(options.seed_samples, 8);
  std::vector<Vec3> samples(ns + 1);
  for (int i = 0; i <= ns; ++i)
    samples[i] = curve.eval_unchecked_order(lo + (hi - lo) * double(i) / ns, 0);

  ProjectStats local;
  std::vector<ProjectedObstacle> out;
  out.reserve(cloud.points.size());
  for (const Vec3& p : cloud.points) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= ns; ++i) {
      const double d = (p - samples[i]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    double xi;
    try {
      xi = closest_point(curve, p, lo + (hi - lo) * double(best) / ns);
    } catch (const ProjectionError&) {
      local.dropped_clamped++;
      continue;
    } catch (const SaddlePointError&) {
      local.dropped_clamped++;
      continue;
    }
    const FrameSample f = frame_at(frames, xi);
    const Vec3 d = p - curve.eval_unchecked_order(xi, 0);
    ProjectedObstacle ob;
    ob.xi = xi;
    ob.x_perp = Vec2(f.e2().dot(d), f.e3().dot(d));
    if (ob.x_perp.norm() > options.max_radius) {
      local.dropped_radius++;
      continue;
    }
    out.push_back(ob);
  }
  if (stats) *stats = local;
  return out;
}

Eigen::Matrix2d EllipseCorridor::E_at(double xi) const {
  const double t = normalized(xi);
  Eigen::Matrix2d E;
  E(0, 0) = chebyshev_eval(cE.row(0), t);
  E(0, 1) = E(1, 0) = chebyshev_eval(cE.row(1), t);
  E(1, 1) = chebyshev_eval(cE.row(2), t);
  return E;
}

Vec2 EllipseCorridor::d_at(double xi) const {
  const double t = normalized(xi);
  return Vec2(chebyshev_eval(dE.row(0), t), chebyshev_eval(dE.row(1), t));
}

double EllipseCorridor::boundary_residual(double xi, const Vec2& x_perp) const {
  return x_perp.dot(E_at(xi) * x_perp) - d_at(xi).dot(x_perp);
}

EllipseSection ellipse_at(const EllipseCorridor& c, double xi) {
  if (xi < c.xi0 || xi > c.xi1)
    throw std::domain_error("ellipse_at: xi outside corridor domain");
  EllipseSection s;
  s.E = c.E_at(xi);
  s.d = c.d_at(xi);
  const double tr = s.E.trace();
  const double det = s.E.determinant();
  const double disc = tr * tr / 4.0 - det;
  const double lam_min = tr / 2.0 - std::sqrt(std::max(disc, 0.0));
  const double lam_max = tr / 2.0 + std::sqrt(std::max(disc, 0.0));
  if (lam_min <= 0.0)
    throw CorridorError("ellipse_at: E not positive definite at xi " +
                        std::to_string(xi));
  s.center = 0.5 * s.E.inverse() * s.d;
  const double level = 1.0 + 0.25 * s.d.dot(s.E.inverse() * s.d);
  s.axes = Vec2(std::sqrt(level / lam_min), std::sqrt(level / lam_max));
  return s;
}

namespace {

// Decision layout: [cE11 | cE12 | cE22 | d1 | d2], degree+1 coefficients
// each, Chebyshev basis on the normalized xi.
struct EllipseLp {
  int nc;  // coefficients per polynomial
  int block(int which) const { return which * nc; }
};

}  // namespace

EllipseCorridor generate(const ParametricCurve& curve, const FrameField& frames,
                         const std::vector<ProjectedObstacle>& obstacles,
                         int degree, int n_samples, double wrapper_radius) {
  (void)frames;
  if (degree < 0) throw std::invalid_argument("generate: degree must be >= 0");
  if (n_samples < 2 * (degree + 1))
    throw std::invalid_argument("generate: n_samples must be >= 2(degree+1)");
  if (!(wrapper_radius > 0.0))
    throw std::invalid_argument("generate: wrapper_radius must be positive");

  EllipseCorridor c;
  c.degree = degree;
  c.xi0 = curve.theta_min();
  c.xi1 = curve.theta_max();
  c.wrapper_radius = wrapper_radius;

  const EllipseLp lay{degree + 1};
  const int nv = 5 * lay.nc;
  const int rows_dom = 4 * n_samples;
  const int rows_wrap = kWrapperPoints * n_samples;
  const int rows_obs = int(obstacles.size());

  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.A_ub = Eigen::MatrixXd::Zero(rows_dom + rows_wrap + rows_obs, nv);
  lp.b_ub = Eigen::VectorXd::Zero(rows_dom + rows_wrap + rows_obs);

  auto basis_at = [&](double xi) {
    return chebyshev_basis(degree, c.normalized(xi));
  };
  auto exclusion_row = [&](int row, const Eigen::VectorXd& T, const Vec2& x) {
    // x'Ex - d'x >= 1  ->  -(x1^2 E11 + 2 x1 x2 E12 + x2^2 E22) + d'x <= -1
    lp.A_ub.block(row, lay.block(0), 1, lay.nc) = -x[0] * x[0] * T.transpose();
    lp.A_ub.block(row, lay.block(1), 1, lay.nc) =
        -2.0 * x[0] * x[1] * T.transpose();
    lp.A_ub.block(row, lay.block(2), 1, lay.nc) = -x[1] * x[1] * T.transpose();
    lp.A_ub.block(row, lay.block(3), 1, lay.nc) = x[0] * T.transpose();
    lp.A_ub.block(row, lay.block(4), 1, lay.nc) = x[1] * T.transpose();
    lp.b_ub[row] = -1.0;
  };

  int r = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double xi = c.xi0 + (c.xi1 - c.xi0) * double(i) / (n_samples - 1);
    const Eigen::VectorXd T = basis_at(xi);
    lp.c.segment(lay.block(0), lay.nc) += T;
    lp.c.segment(lay.block(2), lay.nc) += T;

    // E11 - E12 >= m, E11 + E12 >= m, E22 - E12 >= m, E22 + E12 >= m
    for (int variant = 0; variant < 4; ++variant) {
      const int diag = variant < 2 ? 0 : 2;
      const double sgn = (variant % 2 == 0) ? 1.0 : -1.0;
      lp.A_ub.block(r, lay.block(diag), 1, lay.nc) = -T.transpose();
      lp.A_ub.block(r, lay.block(1), 1, lay.nc) += sgn * T.transpose();
      lp.b_ub[r] = -kDominanceMargin;
      ++r;
    }
    for (int k = 0; k < kWrapperPoints; ++k) {
      const double ang = 2.0 * M_PI * double(k) / kWrapperPoints;
      const Vec2 x = wrapper_radius * Vec2(std::cos(ang), std::sin(ang));
      exclusion_row(r, T, x);
      ++r;
    }
  }
  for (const ProjectedObstacle& ob : obstacles) {
    exclusion_row(r, basis_at(ob.xi), ob.x_perp);
    ++r;
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible)
    throw CorridorError(
        "generate: corridor LP infeasible (an obstacle inside the wrapper "
        "contradicts the path wrapper; " +
        std::to_string(obstacles.size()) + " obstacles, " +
        std::to_string(n_samples) + " samples)");
  if (sol.status == LpStatus::Unbounded)
    throw CorridorError("generate: corridor LP unbounded (wrapper missing?)");

  c.cE = Eigen::MatrixXd(3, lay.nc);
  c.dE = Eigen::MatrixXd(2, lay.nc);
  for (int k = 0; k < lay.nc; ++k) {
    c.cE(0, k) = sol.x[lay.block(0) + k];
    c.cE(1, k) = sol.x[lay.block(1) + k];
    c.cE(2, k) = sol.x[lay.block(2) + k];
    c.dE(0, k) = sol.x[lay.block(3) + k];
    c.dE(1, k) = sol.x[lay.block(4) + k];
  }

  // Certify the corridor invariants independently of the LP.
  for (int i = 0; i < n_samples; ++i) {
    const double xi = c.xi0 + (c.xi1 - c.xi0) * double(i) / (n_samples - 1);
    const Eigen::Matrix2d E = c.E_at(xi);
    if (!(E(0, 0) > 0.0) || !(E(1, 1) > 0.0) ||
        E(0, 0) <= std::abs(E(0, 1)) + 1e-9 ||
        E(1, 1) <= std::abs(E(0, 1)) + 1e-9)
      throw CorridorError("generate: diagonal dominance violated at sample " +
                          std::to_string(i));
  }
  for (const ProjectedObstacle& ob : obstacles) {
    if (c.boundary_residual(ob.xi, ob.x_perp) < 1.0 - 1e-8)
      throw CorridorError("generate: obstacle at xi " + std::to_string(ob.xi) +
                          " ended up inside the corridor");
  }
  return c;
}

double PlanarCorridor::eval_lower(double xi) const {
  const double t = 2.0 * (xi - xi0) / (xi1 - xi0) - 1.0;
  return chebyshev_eval(lower, t);
}

double PlanarCorridor::eval_upper(double xi) const {
  const double t = 2.0 * (xi - xi0) / (xi1 - xi0) - 1.0;
  return chebyshev_eval(upper, t);
}

PlanarCorridor generate_planar(const ParametricCurve& curve,
                               const FrameField& frames,
                               const std::vector<ProjectedObstacle>& obstacles,
                               int degree, int n_samples,
                               double wrapper_halfwidth) {
  (void)frames;
  if (curve.dimension() != 2)
    throw std::invalid_argument("generate_planar: planar curve required");
  if (degree < 0) throw std::invalid_argument("generate_planar: degree >= 0");
  if (n_samples < 2 * (degree + 1))
    throw std::invalid_argument("generate_planar: n_samples >= 2(degree+1)");
  if (!(wrapper_halfwidth > 0.0))
    throw std::invalid_argument("generate_planar: wrapper must be positive");

  PlanarCorridor c;
  c.degree = degree;
  c.xi0 = curve.theta_min();
  c.xi1 = curve.theta_max();
  c.wrapper_halfwidth = wrapper_halfwidth;

  const int nc = degree + 1;
  const int nv = 2 * nc;  // [lower | upper]
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  LpProblem lp;
  lp.c = Eigen::VectorXd::Zero(nv);

  auto basis = [&](double xi) {
    return chebyshev_basis(degree, 2.0 * (xi - c.xi0) / (c.xi1 - c.xi0) - 1.0);
  };

  for (int i = 0; i < n_samples; ++i) {
    const double xi = c.xi0 + (c.xi1 - c.xi0) * double(i) / (n_samples - 1);
    const Eigen::VectorXd T = basis(xi);
    lp.c.head(nc) += T;   // minimize sum(lower)
    lp.c.tail(nc) -= T;   // maximize sum(upper)

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    row.tail(nc) = T.transpose();  // upper <= wrapper
    rows.push_back(row);
    rhs.push_back(wrapper_halfwidth);

    row.setZero();
    row.head(nc) = -T.transpose();  // -lower <= wrapper
    rows.push_back(row);
    rhs.push_back(wrapper_halfwidth);

    row.setZero();
    row.tail(nc) = -T.transpose();  // upper >= 0
    rows.push_back(row);
    rhs.push_back(0.0);

    row.setZero();
    row.head(nc) = T.transpose();  // lower <= 0
    rows.push_back(row);
    rhs.push_back(0.0);
  }
  for (const ProjectedObstacle& ob : obstacles) {
    const double eta = ob.x_perp[0];
    if (eta == 0.0)
      throw CorridorError("generate_planar: obstacle lies on the path at xi " +
                          std::to_string(ob.xi));
    const Eigen::VectorXd T = basis(ob.xi);
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    if (eta > 0.0) {
      row.tail(nc) = T.transpose();  // upper(xi) <= eta
      rows.push_back(row);
      rhs.push_back(eta);
    } else {
      row.head(nc) = -T.transpose();  // lower(xi) >= eta
      rows.push_back(row);
      rhs.push_back(-eta);
    }
  }

  lp.A_ub = Eigen::MatrixXd(rows.size(), nv);
  lp.b_ub = Eigen::VectorXd(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    lp.A_ub.row(i) = rows[i];
    lp.b_ub[i] = rhs[i];
  }

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw CorridorError("generate_planar: corridor LP " +
                        std::string(sol.status == LpStatus::Infeasible
                                        ? "infeasible"
                                        : "unbounded"));
  c.lower = sol.x.head(nc);
  c.upper = sol.x.tail(nc);
  return c;
}

bool contains(const EllipseCorridor& c, const ParametricCurve& curve,
              const FrameField& frames, const Vec3& p) {
  const double xi = global_project(curve, p);
  const FrameSample f = frame_at(frames, xi);
  const Vec3 d = p - curve.eval_unchecked_order(xi, 0);
  const Vec2 x(f.e2().dot(d), f.e3().dot(d));
  return c.boundary_residual(xi, x) <= 1.0 - 1e-9;
}

double volume(const EllipseCorridor& c, const ParametricCurve& curve,
              int n_quadrature) {
  if (n_quadrature < 1)
    throw std::invalid_argument("volume: n_quadrature must be >= 1");
  const double dxi = (c.xi1 - c.xi0) / n_quadrature;
  double acc = 0.0;
  for (int i = 0; i <= n_quadrature; ++i) {
    const double xi = c.xi0 + dxi * i;
    const double det = c.E_at(xi).determinant();
    if (det <= 0.0)
      throw CorridorError("volume: det E <= 0 at xi " + std::to_string(xi));
    const double area = M_PI / std::sqrt(det);
    const double w = (i == 0 || i == n_quadrature) ? 0.5 : 1.0;
    acc += w * area * curve.parametric_speed(xi);
  }
  return acc * dxi;
}

nlohmann::json corridor_to_json(const EllipseCorridor& c) {
  nlohmann::json j;
  j["degree"] = c.degree;
  j["domain"] = {c.xi0, c.xi1};
  j["wrapper_radius"] = c.wrapper_radius;
  for (int r = 0; r < 3; ++r) {
    std::vector<double> row(c.cE.cols());
    for (int k = 0; k < c.cE.cols(); ++k) row[k] = c.cE(r, k);
    j["cE"].push_back(row);
  }
  for (int r = 0; r < 2; ++r) {
    std::vector<double> row(c.dE.cols());
    for (int k = 0; k < c.dE.cols(); ++k) row[k] = c.dE(r, k);
    j["dE"].push_back(row);
  }
  return j;
}

EllipseCorridor corridor_from_json(const nlohmann::json& j) {
  EllipseCorridor c;
  c.degree = j.at("degree").get<int>();
  c.xi0 = j.at("domain").at(0).get<double>();
  c.xi1 = j.at("domain").at(1).get<double>();
  c.wrapper_radius = j.at("wrapper_radius").get<double>();
  c.cE = Eigen::MatrixXd(3, c.degree + 1);
  c.dE = Eigen::MatrixXd(2, c.degree + 1);
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k <= c.degree; ++k)
      c.cE(r, k) = j.at("cE").at(r).at(k).get<double>();
  for (int r = 0; r < 2; ++r)
    for (int k = 0; k <= c.degree; ++k)
      c.dE(r, k) = j.at("dE").at(r).at(k).get<double>();
  return c;
}

nlohmann::json planar_corridor_to_json(const PlanarCorridor& c) {
  nlohmann::json j;
  j["degree"] = c.degree;
  j["domain"] = {c.xi0, c.xi1};
  j["wrapper_halfwidth"] = c.wrapper_halfwidth;
  j["lower"] = std::vector<double>(c.lower.data(), c.lower.data() + c.lower.size());
  j["upper"] = std::vector<double>(c.upper.data(), c.upper.data() + c.upper.size());
  return j;
}

PlanarCorridor planar_corridor_from_json(const nlohmann::json& j) {
  PlanarCorridor c;
  c.degree = j.at("degree").get<int>();
  c.xi0 = j.at("domain").at(0).get<double>();
  c.xi1 = j.at("domain").at(1).get<double>();
  c.wrapper_halfwidth = j.at("wrapper_halfwidth").get<double>();
  const auto lo = j.at("lower").get<std::vector<double>>();
  const auto up = j.at("upper").get<std::vector<double>>();
  c.lower = Eigen::Map<const Eigen::VectorXd>(lo.data(), lo.size());
  c.upper = Eigen::Map<const Eigen::VectorXd>(up.data(), up.size());
  return c;
}

PointCloud cloud_from_csv(const std::string& text) {
  PointCloud cloud;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (vals.size() != 2 && vals.size() != 3)
      throw std::invalid_argument("cloud_from_csv: rows need 2 or 3 coords");
    cloud.points.push_back(
        Vec3(vals[0], vals[1], vals.size() == 3 ? vals[2] : 0.0));
  }
  return cloud;
}

PointCloud cloud_from_json(const nlohmann::json& j) {
  PointCloud cloud;
  for (const auto& row : j) {
    if (row.size() != 2 && row.size() != 3)
      throw std::invalid_argument("cloud_from_json: points need 2 or 3 coords");
    cloud.points.push_back(Vec3(row.at(0).get<double>(), row.at(1).get<double>(),
                                row.size() == 3 ? row.at(2).get<double>() : 0.0));
  }
  return cloud;
}

}  // namespace ppf
