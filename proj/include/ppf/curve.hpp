#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ppf/types.hpp"

namespace ppf {

/// Ordered interpolation targets. Points are 2D (z = 0) or 3D depending on
/// `dimension`; `params` optionally pins the parameter value of each point.
struct WaypointSet {
  int dimension = 3;
  std::vector<Vec3> points;
  std::vector<double> params;  // empty, or one value per point

  void validate() const;  // >= 2 points, no identical consecutive points
};

/// Derivatives prescribed at the two ends of an interpolated curve, one
/// vector per order 1..continuity. Empty vectors mean "estimate instead".
struct ClampedEnds {
  std::vector<Vec3> start;
  std::vector<Vec3> end;
};

/// Piecewise-polynomial map theta -> R^2 or R^3 with exact derivatives.
///
/// Segment i covers [knots[i], knots[i+1]] and stores monomial coefficients
/// in the normalized local coordinate s = (theta - knots[i]) / h_i, one row
/// per spatial dimension. Evaluation at an interior knot uses the
/// right-hand segment.
class ParametricCurve {
 public:
  ParametricCurve(int dimension, std::vector<double> knots,
                  std::vector<Eigen::MatrixXd> segment_coeffs,
                  int continuity_class);

  int dimension() const { return dimension_; }
  int continuity_class() const { return continuity_; }
  double theta_min() const { return knots_.front(); }
  double theta_max() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Eigen::MatrixXd>& segments() const { return coeffs_; }

  /// Derivative of order 0..4 at theta. z component is 0 for 2D curves.
  /// Throws std::domain_error if theta is outside [theta_min, theta_max].
  Vec3 eval(double theta, int order = 0) const;

  /// One-sided evaluation: `left` selects the segment ending at theta when
  /// theta is an interior knot. Used to measure continuity defects.
  Vec3 eval_one_sided(double theta, int order, bool left) const;

  /// Exact polynomial derivative of any order (internal orders above 4 are
  /// needed by analytic frame formulas; the public contract is 0..4).
  Vec3 eval_unchecked_order(double theta, int order) const;

  /// ||gamma'(theta)||. Throws if below 1e-12 (degenerate parameterization).
  double parametric_speed(double theta) const;

  /// Integral of the parametric speed from theta_min to theta, adaptive
  /// 15-point Gauss-Legendre, absolute tolerance 1e-10.
  double arc_length(double theta) const;

  /// Value + derivative continuity mismatch across interior knots, checked
  /// up to the declared continuity class. Returns the largest defect.
  double max_knot_defect() const;

  /// Invariant checks: knot ordering, declared continuity certified by
  /// max_knot_defect() < 1e-9, positive sampled parametric speed.
  void validate() const;

 private:
  int segment_index(double theta) const;

  int dimension_;
  int continuity_;
  std::vector<double> knots_;
  std::vector<Eigen::MatrixXd> coeffs_;  // dim x (degree+1), per segment
};

/// Interpolating curve through the waypoints with interior-knot matching up
/// to `continuity` (0..4). Polynomial segments have odd degree
/// 2*continuity+1; unless the waypoint set pins parameters, they are
/// assigned by chord length normalized to [0,1]. Derivatives at waypoints
/// come from local polynomial fits; `clamp` overrides them at the two ends.
ParametricCurve interpolate(const WaypointSet& wps, int continuity,
                            const ClampedEnds& clamp = {});

/// Curve from full Hermite data: values plus derivatives 1..continuity at
/// every node (each inner vector holds one order for all nodes).
ParametricCurve hermite_curve(int dimension, const std::vector<double>& thetas,
                              const std::vector<Vec3>& values,
                              const std::vector<std::vector<Vec3>>& derivs,
                              int continuity);

/// Joins two curves sharing an endpoint knot into one piecewise curve. The
/// declared continuity of the result is `continuity`; the junction is NOT
/// re-checked (this is the entry point for continuity-defect experiments).
ParametricCurve concat(const ParametricCurve& a, const ParametricCurve& b,
                       int continuity);

/// Derivatives 1..orders at node `i` from an interpolating polynomial
/// through the nearest window of nodes (the estimator interpolate() uses).
std::vector<Vec3> estimate_derivatives(const std::vector<double>& params,
                                       const std::vector<Vec3>& points, int i,
                                       int orders, int dimension);

nlohmann::json curve_to_json(const ParametricCurve& c);
ParametricCurve curve_from_json(const nlohmann::json& j);

/// One point per row, "x,y" or "x,y,z". With `with_params`, the first
/// column is the parameter value.
WaypointSet waypoints_from_csv(const std::string& text, bool with_params = false);

}  // namespace ppf
