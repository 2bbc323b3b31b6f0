#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ppf/curve.hpp"

namespace ppf {

/// Closed-form curve with derivatives through order 4, used to seed
/// piecewise-polynomial curves and as ground truth in experiments.
struct AnalyticCurve {
  int dimension = 3;
  double theta0 = 0.0;
  double theta1 = 1.0;
  // jets[k] = k-th derivative at theta, k = 0..4
  std::function<std::array<Vec3, 5>(double)> jets;
};

/// Named test curves: "line", "sin2d", "coil3d", "sinref", "contcurve",
/// "circle" (unit), "helix" (a=b=1). Throws std::invalid_argument otherwise.
AnalyticCurve analytic_curve(const std::string& name);

/// Hermite-samples an analytic curve into a C^continuity piecewise
/// polynomial with exact derivative data at `n_nodes` uniform nodes.
ParametricCurve to_parametric(const AnalyticCurve& ac, int n_nodes,
                              int continuity = 4);

/// Named curve at a default node count high enough that the polynomial
/// stand-in tracks the analytic derivatives below 1e-10.
ParametricCurve builtin_curve(const std::string& name);

}  // namespace ppf
