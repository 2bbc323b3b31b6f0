#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "ppf/lp.hpp"

using namespace ppf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exhaustive vertex enumeration over all n-subsets of the row system
// (A_ub plus bound rows); the optimum of a bounded feasible LP sits on one
// of these vertices.
double brute_force_objective(const LpProblem& p) {
  const int n = p.num_vars();
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < p.num_rows(); ++i) {
    rows.push_back(p.A_ub.row(i));
    rhs.push_back(p.b_ub[i]);
  }
  for (int j = 0; j < n; ++j) {
    if (p.lower.size() && std::isfinite(p.lower[j])) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
      r[j] = -1.0;
      rows.push_back(r);
      rhs.push_back(-p.lower[j]);
    }
    if (p.upper.size() && std::isfinite(p.upper[j])) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
      r[j] = 1.0;
      rows.push_back(r);
      rhs.push_back(p.upper[j]);
    }
  }
  const int m = int(rows.size());
  double best = kInf;
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) {
        A.row(i) = rows[idx[i]];
        b[i] = rhs[idx[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      for (int i = 0; i < m; ++i)
        if (rows[i].dot(x) > rhs[i] + 1e-9) return;
      best = std::min(best, p.c.dot(x));
      return;
    }
    for (int i = start; i <= m - (n - k); ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

LpProblem random_feasible_lp(std::mt19937& rng) {
  std::uniform_int_distribution<int> nd(2, 5), md(3, 10);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> x0d(0.2, 2.0);
  std::uniform_real_distribution<double> slack(0.1, 1.0);
  const int n = nd(rng), m = md(rng);
  LpProblem p;
  p.c = Eigen::VectorXd::NullaryExpr(n, [&](int) { return coef(rng); });
  p.A_ub = Eigen::MatrixXd::NullaryExpr(m, n, [&](int, int) { return coef(rng); });
  const Eigen::VectorXd x0 =
      Eigen::VectorXd::NullaryExpr(n, [&](int) { return x0d(rng); });
  p.b_ub = p.A_ub * x0 +
           Eigen::VectorXd::NullaryExpr(m, [&](int) { return slack(rng); });
  p.lower = Eigen::VectorXd::Zero(n);
  p.upper = Eigen::VectorXd::Constant(n, 4.0);
  return p;
}

}  // namespace

TEST_CASE("solve_lp: one-variable maximum") {
  LpProblem p;
  p.c = Eigen::VectorXd::Constant(1, -1.0);
  p.A_ub = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.b_ub = Eigen::VectorXd::Constant(1, 1.0);
  p.lower = Eigen::VectorXd::Zero(1);
  p.upper = Eigen::VectorXd::Constant(1, kInf);
  const LpSolution s = solve_lp(p);
  CHECK(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("solve_lp: symmetric two-variable cover") {
  LpProblem p;
  p.c = Eigen::VectorXd::Ones(2);
  p.A_ub = Eigen::MatrixXd(1, 2);
  p.A_ub << -1.0, -1.0;
  p.b_ub = Eigen::VectorXd::Constant(1, -1.0);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Constant(2, kInf);
  const LpSolution s = solve_lp(p);
  CHECK(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("solve_lp: infeasible and unbounded statuses") {
  LpProblem inf;
  inf.c = Eigen::VectorXd::Ones(1);
  inf.A_ub = Eigen::MatrixXd::Constant(1, 1, 1.0);
  inf.b_ub = Eigen::VectorXd::Constant(1, -1.0);
  inf.lower = Eigen::VectorXd::Zero(1);
  inf.upper = Eigen::VectorXd::Constant(1, kInf);
  CHECK(solve_lp(inf).status == LpStatus::Infeasible);

  LpProblem unb;
  unb.c = Eigen::VectorXd::Constant(1, -1.0);
  unb.A_ub = Eigen::MatrixXd(0, 1);
  unb.b_ub = Eigen::VectorXd(0);
  unb.lower = Eigen::VectorXd::Zero(1);
  unb.upper = Eigen::VectorXd::Constant(1, kInf);
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("solve_lp: rejects NaN input") {
  LpProblem p;
  p.c = Eigen::VectorXd::Constant(1, std::nan(""));
  p.A_ub = Eigen::MatrixXd(0, 1);
  p.b_ub = Eigen::VectorXd(0);
  CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
}

TEST_CASE("solve_lp: random problems match vertex enumeration") {
  std::mt19937 rng(101u);
  for (int trial = 0; trial < 40; ++trial) {
    const LpProblem p = random_feasible_lp(rng);
    const LpSolution s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    const double oracle = brute_force_objective(p);
    CHECK(std::abs(s.objective - oracle) < 1e-7 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("solve_lp: deterministic and permutation invariant") {
  std::mt19937 rng(7u);
  const LpProblem p = random_feasible_lp(rng);
  const LpSolution a = solve_lp(p);
  const LpSolution b = solve_lp(p);
  CHECK((a.x - b.x).norm() == 0.0);

  LpProblem perm = p;
  const int m = p.num_rows();
  for (int i = 0; i < m; ++i) {
    perm.A_ub.row(i) = p.A_ub.row(m - 1 - i);
    perm.b_ub[i] = p.b_ub[m - 1 - i];
  }
  const LpSolution c = solve_lp(perm);
  CHECK(std::abs(a.objective - c.objective) < 1e-8 * (1.0 + std::abs(a.objective)));
}

TEST_CASE("solve_lp: scaling the cost scales the objective only") {
  std::mt19937 rng(13u);
  const LpProblem p = random_feasible_lp(rng);
  const LpSolution base = solve_lp(p);
  LpProblem scaled = p;
  scaled.c *= 3.5;
  const LpSolution s = solve_lp(scaled);
  CHECK(s.objective == doctest::Approx(3.5 * base.objective).epsilon(1e-10));
  CHECK((s.x - base.x).norm() < 1e-9);
}

TEST_CASE("solve_lp: dual route on a many-row free-variable problem") {
  // regular 64-gon around (3, 4): minimize x+y -> touches the polygon's
  // lower-left supporting vertex
  const int m = 64;
  LpProblem p;
  p.c = Eigen::VectorXd::Ones(2);
  p.A_ub = Eigen::MatrixXd(m, 2);
  p.b_ub = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) {
    const double a = 2.0 * M_PI * i / m;
    p.A_ub(i, 0) = std::cos(a);
    p.A_ub(i, 1) = std::sin(a);
    p.b_ub[i] = std::cos(a) * 3.0 + std::sin(a) * 4.0 + 1.0;  // radius 1
  }
  const LpSolution s = solve_lp(p);
  CHECK(s.status == LpStatus::Optimal);
  // support function of the disk in direction -(1,1)/sqrt(2), slightly
  // faceted by the 64-gon
  CHECK(s.objective == doctest::Approx(7.0 - std::sqrt(2.0)).epsilon(1e-3));
  REQUIRE(s.dual.size() == m);
  // weak duality: -b'lambda <= objective, with A'lambda = -c
  CHECK((p.A_ub.transpose() * s.dual + p.c).norm() < 1e-8);
  CHECK(-p.b_ub.dot(s.dual) <= s.objective + 1e-8);

  // infeasible with free variables: flip a face inward past the center
  LpProblem bad = p;
  bad.b_ub[0] = -10.0;
  CHECK(solve_lp(bad).status == LpStatus::Infeasible);
}

TEST_CASE("lp_dump emits the documented sections") {
  std::mt19937 rng(3u);
  const LpProblem p = random_feasible_lp(rng);
  const std::string text = lp_dump(p, "demo");
  CHECK(text.find("NAME demo") != std::string::npos);
  CHECK(text.find("ROWS") != std::string::npos);
  CHECK(text.find("COLUMNS") != std::string::npos);
  CHECK(text.find("RHS") != std::string::npos);
  CHECK(text.find("BOUNDS") != std::string::npos);
  CHECK(text.find("ENDATA") != std::string::npos);
}
