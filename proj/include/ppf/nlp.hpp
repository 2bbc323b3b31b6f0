#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace ppf {

/// Dense nonlinear program
///   min f(z)  s.t.  ce(z) = 0,  ci(z) <= 0,  lb <= z <= ub
/// with callable residuals and Jacobians. Simple bounds are kept apart from
/// the general inequalities: the solver enforces them by projection, which
/// is what makes saturated minimum-time arcs tractable. Transcription
/// metadata (node and input counts) rides along so trajectories can be
/// unpacked from z.
struct NlpProblem {
  int num_vars = 0;
  std::function<double(const Eigen::VectorXd&)> cost;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> cost_grad;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eq;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eq_jac;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ineq;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> ineq_jac;
  // optional diagonal cost curvature for the Gauss-Newton inner solver
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> cost_hess_diag;
  Eigen::VectorXd lower;  // empty means unbounded
  Eigen::VectorXd upper;
  Eigen::VectorXd initial_guess;

  Eigen::VectorXd clamp_to_bounds(const Eigen::VectorXd& z) const;

  // decision layout: states at nodes 0..n_nodes, inputs at 0..n_nodes-1
  int n_states = 0;
  int n_inputs = 0;
  int n_nodes = 0;
  std::vector<double> grid;

  /// max(|ce|_inf, max(ci)+) at z.
  double max_violation(const Eigen::VectorXd& z) const;
  void validate() const;  // callables set, finite residuals at the guess
};

struct AlOptions {
  double feas_tol = 1e-5;
  double grad_tol = 1e-4;
  int max_outer = 200;
  int max_inner = 50;
  double mu0 = 1e3;
  double mu_growth = 10.0;
  double mu_max = 1e6;
};

struct AlIterate {
  double cost = 0.0;
  double violation = 0.0;
  double mu = 0.0;
  double kkt = 0.0;
  bool accepted = false;
};

struct AlReport {
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double max_violation = 0.0;
  double kkt_grad_norm = 0.0;
  std::vector<AlIterate> trace;
};

/// Augmented-Lagrangian outer loop with bound-projected, damped
/// Gauss-Newton inner solves (constraint curvature mu J'J plus the diagonal
/// cost curvature when supplied). Deterministic
/// for identical inputs. The incumbent is replaced when an outer iterate
/// clearly reduces infeasibility, or is feasible-enough and reduces cost;
/// the returned point is the last accepted iterate even when the loop stops
/// at max_outer without meeting the tolerances (converged=false).
Eigen::VectorXd solve_augmented_lagrangian(const NlpProblem& nlp,
                                           const AlOptions& options,
                                           AlReport& report);

}  // namespace ppf
