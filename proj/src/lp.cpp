#include "ppf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

namespace ppf {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kReducedCostTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard-form solver: min c'x s.t. Ax = b, x >= 0. Phase 1 starts from an
// all-artificial basis; Bland's rule (smallest eligible index) in both
// phases makes the pivot sequence, and hence the result, deterministic.
struct StandardSimplex {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  int m = 0, n = 0;
  std::vector<int> basis;
  Eigen::MatrixXd Binv;
  Eigen::VectorXd xb;
  int iterations = 0;
  LpStatus status = LpStatus::Optimal;

  void refactor() {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Binv = lu.inverse();
    xb = Binv * b;
  }

  // One simplex phase over the objective `cost`; eligible columns only.
  // Dantzig pricing with a stabilized ratio test; strict Bland rules take
  // over while the objective stalls, so degenerate cycles terminate.
  bool run_phase(const Eigen::VectorXd& cost, const std::vector<bool>& eligible) {
    const int max_iter = 20000 + 40 * (m + n);
    std::vector<char> in_basis(n, 0);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n) in_basis[basis[i]] = 1;

    double last_obj = kInf;
    int stall = 0;
    bool bland = false;
    for (;; ++iterations) {
      if (iterations > max_iter)
        throw LpSolverFailure("simplex: iteration limit at iteration " +
                              std::to_string(iterations) + ", basis size " +
                              std::to_string(m));
      Eigen::VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb[i] = cost[basis[i]];
      const double obj = cb.dot(xb);
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        last_obj = obj;
        stall = 0;
        bland = false;
      } else if (++stall > 2 * m + 64) {
        bland = true;
      }
      const Eigen::RowVectorXd y = cb.transpose() * Binv;

      int entering = -1;
      double most_negative = -kReducedCostTol;
      for (int j = 0; j < n; ++j) {
        if (!eligible[j] || in_basis[j]) continue;
        const double reduced = cost[j] - y.dot(A.col(j));
        if (bland) {
          if (reduced < -kReducedCostTol) {
            entering = j;  // smallest eligible index
            break;
          }
        } else if (reduced < most_negative) {
          most_negative = reduced;
          entering = j;
        }
      }
      if (entering < 0) return true;

      const Eigen::VectorXd d = Binv * A.col(entering);
      const double d_scale = d.cwiseAbs().maxCoeff();
      const double pivot_tol = std::max(kPivotTol, 1e-9 * d_scale);
      double min_ratio = kInf;
      for (int i = 0; i < m; ++i)
        if (d[i] > pivot_tol) min_ratio = std::min(min_ratio, xb[i] / d[i]);
      if (min_ratio == kInf) {
        status = LpStatus::Unbounded;
        return true;
      }
      int leaving = -1;
      const double ratio_tol = 1e-9 * (1.0 + std::abs(min_ratio));
      for (int i = 0; i < m; ++i) {
        if (d[i] <= pivot_tol) continue;
        if (xb[i] / d[i] > min_ratio + ratio_tol) continue;
        if (bland) {
          // smallest basic index among the tied rows
          if (leaving < 0 || basis[i] < basis[leaving]) leaving = i;
        } else {
          // largest pivot among the tied rows, then smallest basic index
          if (leaving < 0 || d[i] > d[leaving] * (1.0 + 1e-12) ||
              (std::abs(d[i] - d[leaving]) <= 1e-12 * d[leaving] &&
               basis[i] < basis[leaving]))
            leaving = i;
        }
      }

      if (basis[leaving] < n) in_basis[basis[leaving]] = 0;
      basis[leaving] = entering;
      in_basis[entering] = 1;
      if (iterations % 32 == 31 || d[leaving] < 1e-6 * std::max(1.0, d_scale)) {
        refactor();
      } else {
        // product-form update of the explicit inverse
        const double piv = d[leaving];
        Eigen::RowVectorXd row = Binv.row(leaving) / piv;
        for (int i = 0; i < m; ++i) {
          if (i == leaving) continue;
          Binv.row(i) -= d[i] * row;
        }
        Binv.row(leaving) = row;
        xb = Binv * b;
      }
      for (int i = 0; i < m; ++i) xb[i] = std::max(xb[i], 0.0);
    }
  }

  // Returns primal solution over the n structural columns, or empty on
  // Infeasible/Unbounded status.
  Eigen::VectorXd solve() {
    m = int(b.size());
    n = int(c.size());
    if (m == 0) {
      // no constraints: optimal at the origin unless some cost is negative
      for (int j = 0; j < n; ++j)
        if (c[j] < -kReducedCostTol) {
          status = LpStatus::Unbounded;
          return {};
        }
      return Eigen::VectorXd::Zero(n);
    }
    for (int i = 0; i < m; ++i)
      if (b[i] < 0) {
        A.row(i) = -A.row(i);
        b[i] = -b[i];
      }

    // Phase 1: artificial columns n..n+m-1 with unit cost.
    Eigen::MatrixXd A1(m, n + m);
    A1.leftCols(n) = A;
    A1.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
    c1.tail(m).setOnes();

    StandardSimplex phase1;
    phase1.A = A1;
    phase1.b = b;
    phase1.m = m;
    phase1.n = n + m;
    phase1.basis.resize(m);
    for (int i = 0; i < m; ++i) phase1.basis[i] = n + i;
    phase1.refactor();
    std::vector<bool> all(n + m, true);
    phase1.run_phase(c1, all);
    iterations += phase1.iterations;
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (phase1.basis[i] >= n) infeas += phase1.xb[i];
    if (infeas > 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
      status = LpStatus::Infeasible;
      return {};
    }

    // Pivot leftover artificials out; rows that cannot pivot are redundant.
    std::vector<int> keep_rows;
    for (int i = 0; i < m; ++i) {
      if (phase1.basis[i] < n) {
        keep_rows.push_back(i);
        continue;
      }
      const Eigen::RowVectorXd row = phase1.Binv.row(i) * A;
      int piv = -1;
      for (int j = 0; j < n; ++j)
        if (std::abs(row[j]) > 1e-9) {
          bool basic = false;
          for (int k = 0; k < m; ++k)
            if (phase1.basis[k] == j) {
              basic = true;
              break;
            }
          if (!basic) {
            piv = j;
            break;
          }
        }
      if (piv >= 0) {
        phase1.basis[i] = piv;
        phase1.refactor();
        keep_rows.push_back(i);
      }
      // else: redundant row, dropped below
    }
    if (int(keep_rows.size()) < m) {
      Eigen::MatrixXd A2(keep_rows.size(), n);
      Eigen::VectorXd b2(keep_rows.size());
      std::vector<int> basis2;
      for (size_t i = 0; i < keep_rows.size(); ++i) {
        A2.row(i) = A.row(keep_rows[i]);
        b2[i] = b[keep_rows[i]];
        basis2.push_back(phase1.basis[keep_rows[i]]);
      }
      A = A2;
      b = b2;
      m = int(keep_rows.size());
      basis = basis2;
    } else {
      basis = phase1.basis;
    }
    refactor();

    std::vector<bool> structural(n, true);
    run_phase(c, structural);
    if (status != LpStatus::Optimal) return {};

    refactor();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
      if (basis[i] < n) x[basis[i]] = xb[i];
    return x;
  }

};

bool has_finite_bounds(const LpProblem& p) {
  for (int j = 0; j < p.lower.size(); ++j)
    if (std::isfinite(p.lower[j])) return true;
  for (int j = 0; j < p.upper.size(); ++j)
    if (std::isfinite(p.upper[j])) return true;
  return false;
}

void certify(const LpProblem& p, const Eigen::VectorXd& x) {
  const double scale = 1e-8 * (1.0 + (p.b_ub.size() ? p.b_ub.lpNorm<Eigen::Infinity>() : 0.0));
  if (p.b_ub.size()) {
    const double resid = (p.A_ub * x - p.b_ub).maxCoeff();
    if (resid > scale)
      throw LpSolverFailure("solve_lp: certification failed, residual " +
                            std::to_string(resid));
  }
  for (int j = 0; j < p.lower.size(); ++j)
    if (x[j] < p.lower[j] - scale)
      throw LpSolverFailure("solve_lp: lower bound violated");
  for (int j = 0; j < p.upper.size(); ++j)
    if (x[j] > p.upper[j] + scale)
      throw LpSolverFailure("solve_lp: upper bound violated");
}

// Many rows, few free variables: pivot on the dual min b'w, A'w = -c,
// w >= 0 and read the primal from the optimal basis rows. Returns nullopt
// when the outcome is ambiguous (dual infeasible, or a rank-deficient dual
// basis); the caller falls back to the direct route.
std::optional<LpSolution> solve_via_dual(const LpProblem& p) {
  const int n = p.num_vars(), m = p.num_rows();
  StandardSimplex s;
  s.A = p.A_ub.transpose();
  s.b = -p.c;
  s.c = p.b_ub;
  Eigen::VectorXd w = s.solve();
  LpSolution out;
  out.iterations = s.iterations;
  if (s.status == LpStatus::Infeasible) return std::nullopt;
  if (s.status == LpStatus::Unbounded) {
    out.status = LpStatus::Infeasible;  // dual unbounded
    return out;
  }
  if (int(s.basis.size()) != n) return std::nullopt;

  // Active rows = final basis; solve A_B x = b_B.
  Eigen::MatrixXd AB(n, n);
  Eigen::VectorXd bB(n);
  for (int i = 0; i < n; ++i) {
    AB.row(i) = p.A_ub.row(s.basis[i]);
    bB[i] = p.b_ub[s.basis[i]];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(AB);
  Eigen::VectorXd x = lu.solve(bB);
  x += lu.solve(bB - AB * x);  // one refinement step

  out.x = x;
  out.status = LpStatus::Optimal;
  out.objective = p.c.dot(x);
  out.dual = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < n; ++i) out.dual[s.basis[i]] = s.xb[i];
  return out;
}

LpSolution solve_direct(const LpProblem& p) {
  const int n = p.num_vars();
  const int m = p.num_rows();

  // Variable transform to y >= 0: shifted, reflected, or split.
  struct VarMap {
    int col0;        // first y column
    bool split;      // x = y0 - y1
    bool reflected;  // x = hi - y0
    double offset;   // x = offset + y0
  };
  std::vector<VarMap> maps(n);
  int ny = 0;
  std::vector<std::pair<int, double>> extra_rows;  // y_col <= value
  for (int j = 0; j < n; ++j) {
    const double lo = p.lower.size() ? p.lower[j] : -kInf;
    const double hi = p.upper.size() ? p.upper[j] : kInf;
    VarMap vm{ny, false, false, 0.0};
    if (std::isfinite(lo)) {
      vm.offset = lo;
      if (std::isfinite(hi)) extra_rows.push_back({ny, hi - lo});
      ny += 1;
    } else if (std::isfinite(hi)) {
      vm.reflected = true;
      vm.offset = hi;
      ny += 1;
    } else {
      vm.split = true;
      ny += 2;
    }
    maps[j] = vm;
  }

  const int m_std = m + int(extra_rows.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_std, ny + m_std);
  Eigen::VectorXd b(m_std);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ny + m_std);

  for (int j = 0; j < n; ++j) {
    const VarMap& vm = maps[j];
    const double sgn = vm.reflected ? -1.0 : 1.0;
    for (int i = 0; i < m; ++i) A(i, vm.col0) = sgn * p.A_ub(i, j);
    c[vm.col0] = sgn * p.c[j];
    if (vm.split) {
      for (int i = 0; i < m; ++i) A(i, vm.col0 + 1) = -p.A_ub(i, j);
      c[vm.col0 + 1] = -p.c[j];
    }
  }
  double obj_offset = 0.0;
  for (int i = 0; i < m; ++i) {
    b[i] = p.b_ub[i];
    for (int j = 0; j < n; ++j) {
      if (maps[j].offset != 0.0) b[i] -= p.A_ub(i, j) * maps[j].offset;
    }
  }
  for (int j = 0; j < n; ++j) obj_offset += p.c[j] * maps[j].offset;
  for (size_t r = 0; r < extra_rows.size(); ++r) {
    A(m + int(r), extra_rows[r].first) = 1.0;
    b[m + int(r)] = extra_rows[r].second;
  }
  for (int i = 0; i < m_std; ++i) A(i, ny + i) = 1.0;  // slacks

  StandardSimplex s;
  s.A = A;
  s.b = b;
  s.c = c;
  Eigen::VectorXd y = s.solve();

  LpSolution out;
  out.iterations = s.iterations;
  out.status = s.status;
  if (s.status != LpStatus::Optimal) return out;

  out.x = Eigen::VectorXd(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& vm = maps[j];
    double v = y[vm.col0];
    if (vm.split) v -= y[vm.col0 + 1];
    if (vm.reflected) v = -v;
    out.x[j] = v + vm.offset;
  }
  out.objective = p.c.dot(out.x);
  (void)obj_offset;
  if (!has_finite_bounds(p) && m >= n) {
    // dual multipliers from the dual program on the same data
    auto via = solve_via_dual(p);
    if (via && via->status == LpStatus::Optimal &&
        std::abs(via->objective - out.objective) <=
            1e-7 * (1.0 + std::abs(out.objective)))
      out.dual = via->dual;
  }
  return out;
}

}  // namespace

void LpProblem::validate() const {
  if (A_ub.rows() != b_ub.size() || (A_ub.size() && A_ub.cols() != c.size()))
    throw std::invalid_argument("LpProblem: dimension mismatch");
  if (lower.size() && lower.size() != c.size())
    throw std::invalid_argument("LpProblem: lower bound size mismatch");
  if (upper.size() && upper.size() != c.size())
    throw std::invalid_argument("LpProblem: upper bound size mismatch");
  auto finite_or_inf = [](double v) { return !std::isnan(v); };
  for (int i = 0; i < c.size(); ++i)
    if (std::isnan(c[i])) throw std::invalid_argument("LpProblem: NaN in c");
  for (int i = 0; i < A_ub.size(); ++i)
    if (std::isnan(A_ub.data()[i]))
      throw std::invalid_argument("LpProblem: NaN in A_ub");
  for (int i = 0; i < b_ub.size(); ++i)
    if (std::isnan(b_ub[i])) throw std::invalid_argument("LpProblem: NaN in b_ub");
  for (int i = 0; i < lower.size(); ++i)
    if (!finite_or_inf(lower[i]))
      throw std::invalid_argument("LpProblem: NaN in lower");
  for (int i = 0; i < upper.size(); ++i)
    if (!finite_or_inf(upper[i]))
      throw std::invalid_argument("LpProblem: NaN in upper");
}

LpSolution solve_lp(const LpProblem& p) {
  p.validate();
  const bool dual_shaped =
      !has_finite_bounds(p) && p.num_rows() >= std::max(32, 3 * p.num_vars());
  if (dual_shaped) {
    auto s = solve_via_dual(p);
    if (s) {
      if (s->status == LpStatus::Optimal) certify(p, s->x);
      return *s;
    }
    // ambiguous: fall through to the direct route
  }
  LpSolution s = solve_direct(p);
  if (s.status == LpStatus::Optimal) certify(p, s.x);
  return s;
}

std::string lp_dump(const LpProblem& p, const std::string& name) {
  std::ostringstream os;
  os.precision(17);
  os << "NAME " << name << "\n";
  os << "ROWS\n N COST\n";
  for (int i = 0; i < p.num_rows(); ++i) os << " L R" << i << "\n";
  os << "COLUMNS\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    os << " X" << j << " COST " << p.c[j] << "\n";
    for (int i = 0; i < p.num_rows(); ++i)
      if (p.A_ub(i, j) != 0.0)
        os << " X" << j << " R" << i << " " << p.A_ub(i, j) << "\n";
  }
  os << "RHS\n";
  for (int i = 0; i < p.num_rows(); ++i)
    os << " RHS R" << i << " " << p.b_ub[i] << "\n";
  os << "BOUNDS\n";
  for (int j = 0; j < p.lower.size(); ++j)
    if (std::isfinite(p.lower[j]))
      os << " LO BND X" << j << " " << p.lower[j] << "\n";
  for (int j = 0; j < p.upper.size(); ++j)
    if (std::isfinite(p.upper[j]))
      os << " UP BND X" << j << " " << p.upper[j] << "\n";
  os << "ENDATA\n";
  return os.str();
}

}  // namespace ppf
