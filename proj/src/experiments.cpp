#include "ppf/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "ppf/builtin_curves.hpp"

namespace ppf {
namespace {

constexpr int kWorkingClass = 4;  // interior smoothness of each half

ParametricCurve half_curve(const AnalyticCurve& ac, double a, double b,
                           int n_points, int shared_orders, bool joint_at_end) {
  std::vector<double> th(n_points);
  std::vector<Vec3> pts(n_points);
  for (int i = 0; i < n_points; ++i)
    th[i] = a + (b - a) * double(i) / (n_points - 1);
  th.front() = a;
  th.back() = b;
  for (int i = 0; i < n_points; ++i) pts[i] = ac.jets(th[i])[0];

  std::vector<std::vector<Vec3>> derivs(kWorkingClass,
                                        std::vector<Vec3>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const auto est = estimate_derivatives(th, pts, i, kWorkingClass, 2);
    for (int m = 0; m < kWorkingClass; ++m) derivs[m][i] = est[m];
  }
  // Orders 1..shared_orders at the joint come from the underlying curve so
  // both halves agree there exactly; higher orders keep the one-sided fit.
  const int joint = joint_at_end ? n_points - 1 : 0;
  const auto jet = ac.jets(th[joint]);
  for (int m = 1; m <= shared_orders; ++m) derivs[m - 1][joint] = jet[m];
  return hermite_curve(2, th, pts, derivs, kWorkingClass);
}

}  // namespace

ParametricCurve split_test_curve(int continuity, int waypoints_per_half) {
  if (continuity < 0 || continuity > 4)
    throw std::invalid_argument("split_test_curve: continuity must be 0..4");
  const AnalyticCurve ac = analytic_curve("contcurve");
  const ParametricCurve left =
      half_curve(ac, ac.theta0, 0.5, waypoints_per_half, continuity, true);
  const ParametricCurve right =
      half_curve(ac, 0.5, ac.theta1, waypoints_per_half, continuity, false);
  return concat(left, right, continuity);
}

ContinuityResult continuity_study(int continuity, int waypoints_per_half,
                                  int grid_steps) {
  if (grid_steps % 2 != 0)
    throw std::invalid_argument("continuity_study: grid_steps must be even");
  const ParametricCurve curve = split_test_curve(continuity, waypoints_per_half);

  ContinuityResult res;
  res.continuity = continuity;
  res.trace_theta.resize(grid_steps + 1);
  res.trace_omega.resize(grid_steps + 1);
  res.trace_alpha.resize(grid_steps + 1);
  res.trace_jerk.resize(grid_steps + 1);

  // Grid symmetric about the joint so node grid_steps/2 is exactly 0.5.
  const int joint_idx = grid_steps / 2;
  const double span = curve.theta_max() - curve.theta_min();
  auto node = [&](int i) {
    const double t = 0.5 + span * double(i - joint_idx) / grid_steps;
    return std::clamp(t, curve.theta_min(), curve.theta_max());
  };

  // Manual PTF sweep: the frame arriving at the joint is adapted with the
  // left-hand tangent before the right-hand quantities take over.
  Mat3 R = adapt_frame(initial_frame(curve),
                       tangent_jet(curve, node(0)).e1);
  Mat3 R_left = Mat3::Identity();
  for (int i = 0; i <= grid_steps; ++i) {
    const double theta = node(i);
    const bool at_joint = (i == joint_idx);
    const FrameSample smp = ptf_enrich(curve, theta, R, at_joint);
    res.trace_theta[i] = theta;
    res.trace_omega[i] = smp.omega_world;
    res.trace_alpha[i] = smp.alpha_world;
    res.trace_jerk[i] = smp.jerk_world;
    if (at_joint) {
      R_left = R;
      R = adapt_frame(R, tangent_jet(curve, theta, false).e1);
    }
    if (i < grid_steps) {
      const FrameSample cur = ptf_enrich(curve, theta, R, false);
      Mat3 stepped = so3_exp_step(R, cur.omega_world, node(i + 1) - theta);
      R = adapt_frame(stepped, tangent_jet(curve, node(i + 1),
                                           i + 1 == joint_idx).e1);
    }
  }

  const FrameSample left = ptf_enrich(curve, 0.5, R_left, true);
  const Mat3 R_right = adapt_frame(R_left, tangent_jet(curve, 0.5, false).e1);
  const FrameSample right = ptf_enrich(curve, 0.5, R_right, false);

  res.omega_jump = (right.omega_world - left.omega_world).norm();
  res.alpha_jump = (right.alpha_world - left.alpha_world).norm();
  res.jerk_jump = (right.jerk_world - left.jerk_world).norm();
  res.omega_continuous = res.omega_jump < 1e-6;
  res.alpha_continuous = res.alpha_jump < 1e-6;
  res.jerk_continuous = res.jerk_jump < 1e-6;
  return res;
}

}  // namespace ppf
