#pragma once

#include <vector>

#include "ppf/curve.hpp"
#include "ppf/frames.hpp"

namespace ppf {

/// One row of the continuity study: the test curve split at theta = 0.5 and
/// re-joined with derivative matching up to `continuity`, then the jump of
/// the PTF angular velocity/acceleration/jerk measured as one-sided limits
/// at the joint. A quantity counts as continuous when its jump is < 1e-6.
struct ContinuityResult {
  int continuity = 0;
  double omega_jump = 0.0;
  double alpha_jump = 0.0;
  double jerk_jump = 0.0;
  bool omega_continuous = false;
  bool alpha_continuous = false;
  bool jerk_continuous = false;

  std::vector<double> trace_theta;
  std::vector<Vec3> trace_omega;  // world frame, per unit theta
  std::vector<Vec3> trace_alpha;
  std::vector<Vec3> trace_jerk;
};

/// Builds the split curve for one continuity class: each half interpolated
/// at full working smoothness from its own samples of the test curve, with
/// derivative orders 1..continuity at the joint replaced by shared
/// closed-form values (higher orders stay one-sided estimates and jump).
ParametricCurve split_test_curve(int continuity, int waypoints_per_half = 8);

ContinuityResult continuity_study(int continuity, int waypoints_per_half = 8,
                                  int grid_steps = 1000);

}  // namespace ppf
