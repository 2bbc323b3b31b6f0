#pragma once

#include "ppf/corridor.hpp"
#include "ppf/curve.hpp"
#include "ppf/frames.hpp"
#include "ppf/nlp.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Raised when the time->parameter transformation divides by a vanishing
/// progress rate.
struct StallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TranscriptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two-link arm with absolute joint angles; the end-effector velocity is
///   px_dot = -L1 th1_dot sin(th1) - L2 th2_dot sin(th2)
///   py_dot =  L1 th1_dot cos(th1) + L2 th2_dot cos(th2)
/// State layout: [xi, eta, xi_dot, eta_dot, th1, th2, th1_dot, th2_dot];
/// inputs are the joint accelerations.
struct ManipulatorModel {
  double L1 = 1.0;
  double L2 = 1.0;
  double joint_rate_limit = 1.0;   // |th_dot| <= 1
  double joint_accel_limit = 5.0;  // |th_ddot| <= 5
  double velocity_limit = 1.0;     // componentwise |v| <= 1
};

Vec2 manipulator_position(const ManipulatorModel& m, double th1, double th2);
Vec2 manipulator_velocity(const ManipulatorModel& m,
                          const Eigen::VectorXd& state);
/// Elbow-up branch (first joint rotated toward +normal); throws
/// TranscriptionError when p is out of reach.
Vec2 manipulator_ik(const ManipulatorModel& m, const Vec2& p);
Vec2 manipulator_ik_velocity(const ManipulatorModel& m, const Vec2& angles,
                             const Vec2& v);

/// Planar double integrator in spatial coordinates, used as the transcription
/// sanity model. State [xi, eta, xi_dot, eta_dot], inputs are world-frame
/// accelerations.
struct PointMassModel {
  double accel_limit = 0.5;
  double speed_limit = 1.0;  // componentwise |v|
};

/// Curve/frame data entering the planar spatial dynamics at one xi.
struct PlanarGeometry {
  double xi = 0.0;
  double sigma = 1.0, sigma_p = 0.0;
  Vec2 e1 = Vec2::UnitX(), e2 = Vec2::UnitY();
  Vec2 e1_p = Vec2::Zero(), e2_p = Vec2::Zero();
  double omega3 = 0.0, omega3_p = 0.0;
};
PlanarGeometry planar_geometry(const ParametricCurve& curve,
                               const FrameField& frames, double xi);

/// d(state)/d(xi) = f(state, u) / xi_dot at the state's own xi. Throws
/// StallError when xi_dot <= xi_dot_floor.
Eigen::VectorXd spatialize(const ManipulatorModel& m,
                           const ParametricCurve& curve,
                           const FrameField& frames,
                           const Eigen::VectorXd& state, const Vec2& u,
                           double xi_dot_floor = 1e-4);

struct TranscribeOptions {
  double boundary_speed = 0.1;  // tangential speed pinned at both path ends
  double xi_dot_floor = 1e-4;
};

/// Direct transcription of the spatial-domain minimum-time program:
/// trapezoid cost sum dxi/xi_dot, one RK4 defect per interval, boundary
/// pins at both ends, per-node corridor/bound rows. The initial guess is
/// path tracking at the largest constant xi_dot with componentwise |v|
/// within the velocity limit.
NlpProblem transcribe(const ManipulatorModel& m, const ParametricCurve& curve,
                      const FrameField& frames, const PlanarCorridor& corridor,
                      int N, const TranscribeOptions& options = {});

struct PointMassBoundary {
  double speed_start = 0.1;
  double speed_end = 0.1;
};
NlpProblem transcribe(const PointMassModel& m, const ParametricCurve& curve,
                      const FrameField& frames, const PlanarCorridor& corridor,
                      int N, const PointMassBoundary& boundary = {},
                      double xi_dot_floor = 1e-4);

struct Trajectory {
  std::vector<double> xi;
  Eigen::MatrixXd states;  // (N+1) x nx
  Eigen::MatrixXd inputs;  // N x nu
  double total_time = 0.0;
  AlReport report;
  double max_violation = 0.0;  // revalidated on the returned iterate
};

/// Augmented-Lagrangian solve of a transcribed problem, starting from its
/// stored guess. Non-convergence is reported, not thrown; the best iterate
/// is returned either way.
Trajectory solve(const NlpProblem& nlp, const AlOptions& options = {});

/// Interpolates a coarse solution onto a finer problem's grid (states
/// linearly, inputs held per interval) for mesh-refinement warm starts.
Eigen::VectorXd refine_guess(const Trajectory& coarse, const NlpProblem& fine);

/// CSV export: xi, t, eta, xi_dot, th1, th2, th1_dot, th2_dot, th1_ddot,
/// th2_ddot, p_x, p_y, |v| per node (inputs repeat the last interval's
/// value on the final row).
std::string trajectory_to_csv(const ManipulatorModel& m,
                              const Trajectory& traj);

}  // namespace ppf
