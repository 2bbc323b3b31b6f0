#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ppf/curve.hpp"
#include "ppf/frames.hpp"
#include "ppf/types.hpp"

namespace ppf {

struct CorridorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PointCloud {
  std::vector<Vec3> points;
};

/// Point expressed in the normal plane of its closest path point.
struct ProjectedObstacle {
  double xi = 0.0;
  Vec2 x_perp = Vec2::Zero();
};

struct ProjectOptions {
  double max_radius = std::numeric_limits<double>::infinity();
  int seed_samples = 512;  // coarse argmin grid per point
};

struct ProjectStats {
  int dropped_clamped = 0;  // closest parameter hit a domain end
  int dropped_radius = 0;   // transverse distance above max_radius
};

std::vector<ProjectedObstacle> project_cloud(const ParametricCurve& curve,
                                             const FrameField& frames,
                                             const PointCloud& cloud,
                                             const ProjectOptions& options = {},
                                             ProjectStats* stats = nullptr);

/// Swept off-centered ellipse x'E(xi)x - d(xi)'x <= 1 with Chebyshev
/// coefficient rows (E11, E12, E22) and (d1, d2) over xi normalized to
/// [-1,1]. Center recovered as E^-1 d / 2.
struct EllipseCorridor {
  int degree = 0;
  double xi0 = 0.0;
  double xi1 = 1.0;
  Eigen::MatrixXd cE;  // 3 x (degree+1)
  Eigen::MatrixXd dE;  // 2 x (degree+1)
  double wrapper_radius = 1.0;

  double normalized(double xi) const {
    return 2.0 * (xi - xi0) / (xi1 - xi0) - 1.0;
  }
  Eigen::Matrix2d E_at(double xi) const;
  Vec2 d_at(double xi) const;
  /// x'E x - d'x at the projected obstacle coordinates; >= 1 means outside.
  double boundary_residual(double xi, const Vec2& x_perp) const;
};

struct EllipseSection {
  Eigen::Matrix2d E;
  Vec2 d = Vec2::Zero();
  Vec2 center = Vec2::Zero();
  Vec2 axes = Vec2::Zero();  // (major, minor) semi-axes
};

/// Cross-section geometry at xi. Throws CorridorError if E is not positive
/// definite there.
EllipseSection ellipse_at(const EllipseCorridor& c, double xi);

/// Largest-volume swept ellipse outside all obstacles: minimizes the
/// summed trace of E over n_samples uniform samples subject to diagonal
/// dominance rows, per-obstacle exclusion at the obstacle's own xi, and 16
/// wrapper points on the circle of wrapper_radius at every sample.
EllipseCorridor generate(const ParametricCurve& curve, const FrameField& frames,
                         const std::vector<ProjectedObstacle>& obstacles,
                         int degree, int n_samples, double wrapper_radius);

/// Planar corridor: Chebyshev bounds eta_lo(xi) < 0 < eta_hi(xi); the LP
/// maximizes the summed width (no diagonal dominance needed in 2D).
struct PlanarCorridor {
  int degree = 0;
  double xi0 = 0.0;
  double xi1 = 1.0;
  Eigen::VectorXd lower;  // degree+1 coefficients
  Eigen::VectorXd upper;
  double wrapper_halfwidth = 1.0;

  double eval_lower(double xi) const;
  double eval_upper(double xi) const;
};

PlanarCorridor generate_planar(const ParametricCurve& curve,
                               const FrameField& frames,
                               const std::vector<ProjectedObstacle>& obstacles,
                               int degree, int n_samples,
                               double wrapper_halfwidth);

/// Membership through projection: true iff the boundary residual at the
/// closest path point is <= 1 - 1e-9 (generating obstacles sit on or
/// outside the unit level set, so they report false).
bool contains(const EllipseCorridor& c, const ParametricCurve& curve,
              const FrameField& frames, const Vec3& p);

/// Trapezoid of the cross-section area pi/sqrt(det E) times the metric
/// factor sigma(xi) over n_quadrature+1 uniform nodes.
double volume(const EllipseCorridor& c, const ParametricCurve& curve,
              int n_quadrature);

nlohmann::json corridor_to_json(const EllipseCorridor& c);
EllipseCorridor corridor_from_json(const nlohmann::json& j);
nlohmann::json planar_corridor_to_json(const PlanarCorridor& c);
PlanarCorridor planar_corridor_from_json(const nlohmann::json& j);

PointCloud cloud_from_csv(const std::string& text);
PointCloud cloud_from_json(const nlohmann::json& j);

}  // namespace ppf
