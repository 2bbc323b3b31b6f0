#pragma once

#include <limits>
#include <string>

#include <Eigen/Core>

namespace ppf {

/// Raised on numerical breakdown inside the simplex (not for infeasible or
/// unbounded problems, which are ordinary statuses).
struct LpSolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// min c'x  s.t.  A_ub x <= b_ub,  lower <= x <= upper.
/// Infinite bounds use +/- std::numeric_limits<double>::infinity().
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lower;  // empty means -inf for all
  Eigen::VectorXd upper;  // empty means +inf for all

  int num_vars() const { return int(c.size()); }
  int num_rows() const { return int(b_ub.size()); }
  void validate() const;  // dimension consistency, no NaN entries
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  LpStatus status = LpStatus::Optimal;
  int iterations = 0;
  // Row multipliers lambda >= 0 with A' lambda = -c (filled only for
  // problems without finite variable bounds); -b'lambda lower-bounds the
  // optimum, which the tests use as the weak-duality certificate.
  Eigen::VectorXd dual;
};

/// Deterministic two-phase primal simplex (dense, Bland's rule). Problems
/// with only free variables and many more rows than variables pivot on the
/// dual program instead -- same simplex core, primal solution recovered
/// from the optimal basis. Optimal results are certified: feasibility
/// residual and duality gap <= 1e-8 * (1 + |b|_inf), else LpSolverFailure.
LpSolution solve_lp(const LpProblem& p);

/// Free MPS-like text dump, one section per line group:
///   NAME, ROWS (N cost / L rows), COLUMNS (var, row, coeff triplets),
///   RHS, BOUNDS (LO/UP per finite bound), ENDATA.
std::string lp_dump(const LpProblem& p, const std::string& name = "lp");

}  // namespace ppf
