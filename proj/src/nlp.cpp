#include "ppf/nlp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace ppf {
namespace {
bool trace_enabled() {
  static const bool on = std::getenv("PPF_NLP_TRACE") != nullptr;
  return on;
}
}  // namespace

Eigen::VectorXd NlpProblem::clamp_to_bounds(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = z;
  if (lower.size()) out = out.cwiseMax(lower);
  if (upper.size()) out = out.cwiseMin(upper);
  return out;
}

double NlpProblem::max_violation(const Eigen::VectorXd& z) const {
  double v = 0.0;
  const Eigen::VectorXd ce = eq(z);
  if (ce.size()) v = ce.cwiseAbs().maxCoeff();
  const Eigen::VectorXd ci = ineq(z);
  if (ci.size()) v = std::max(v, std::max(0.0, ci.maxCoeff()));
  if (lower.size()) v = std::max(v, std::max(0.0, (lower - z).maxCoeff()));
  if (upper.size()) v = std::max(v, std::max(0.0, (z - upper).maxCoeff()));
  return v;
}

void NlpProblem::validate() const {
  if (num_vars <= 0) throw std::invalid_argument("NlpProblem: num_vars <= 0");
  if (!cost || !cost_grad || !eq || !eq_jac || !ineq || !ineq_jac)
    throw std::invalid_argument("NlpProblem: missing callables");
  if (initial_guess.size() != num_vars)
    throw std::invalid_argument("NlpProblem: initial guess size mismatch");
  if ((lower.size() && lower.size() != num_vars) ||
      (upper.size() && upper.size() != num_vars))
    throw std::invalid_argument("NlpProblem: bound size mismatch");
  const Eigen::VectorXd z = clamp_to_bounds(initial_guess);
  const Eigen::VectorXd ce = eq(z);
  const Eigen::VectorXd ci = ineq(z);
  if (!ce.allFinite() || !ci.allFinite() || !std::isfinite(cost(z)))
    throw std::invalid_argument("NlpProblem: residuals not finite at guess");
}

namespace {

// Row-sparsity-aware J'J accumulation: transcription Jacobians touch a
// couple of short column spans per row, so the generic rank update wastes
// three orders of magnitude.
void accumulate_weighted_gram(const Eigen::MatrixXd& J, double w,
                              const std::vector<int>* rows,
                              Eigen::MatrixXd& H) {
  std::vector<int> idx;
  const int n = int(J.cols());
  const int m = rows ? int(rows->size()) : int(J.rows());
  for (int k = 0; k < m; ++k) {
    const int r = rows ? (*rows)[k] : k;
    idx.clear();
    for (int j = 0; j < n; ++j)
      if (J(r, j) != 0.0) idx.push_back(j);
    for (size_t a = 0; a < idx.size(); ++a) {
      const double va = w * J(r, idx[a]);
      for (size_t b = a; b < idx.size(); ++b)
        H(idx[a], idx[b]) += va * J(r, idx[b]);
    }
  }
}

struct AlFunctional {
  const NlpProblem& nlp;
  Eigen::VectorXd lambda;  // equality multipliers
  Eigen::VectorXd nu;      // general-inequality multipliers (>= 0)
  double mu = 1e3;

  double value(const Eigen::VectorXd& z) const {
    const double f = nlp.cost(z);
    if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd ce = nlp.eq(z);
    const Eigen::VectorXd ci = nlp.ineq(z);
    if (!ce.allFinite() || !ci.allFinite())
      return std::numeric_limits<double>::infinity();
    double phi = f + lambda.dot(ce) + 0.5 * mu * ce.squaredNorm();
    for (int i = 0; i < ci.size(); ++i) {
      const double t = std::max(0.0, nu[i] + mu * ci[i]);
      phi += (t * t - nu[i] * nu[i]) / (2.0 * mu);
    }
    return phi;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const {
    Eigen::VectorXd g = nlp.cost_grad(z);
    const Eigen::VectorXd ce = nlp.eq(z);
    if (ce.size()) g += nlp.eq_jac(z).transpose() * (lambda + mu * ce);
    const Eigen::VectorXd ci = nlp.ineq(z);
    if (ci.size()) {
      const Eigen::MatrixXd Ji = nlp.ineq_jac(z);
      Eigen::VectorXd act(ci.size());
      for (int i = 0; i < ci.size(); ++i)
        act[i] = std::max(0.0, nu[i] + mu * ci[i]);
      g += Ji.transpose() * act;
    }
    return g;
  }

  // norm of z - P_box(z - g): zero exactly at a bound-constrained
  // stationary point
  double projected_gradient_norm(const Eigen::VectorXd& z,
                                 const Eigen::VectorXd& g) const {
    return (z - nlp.clamp_to_bounds(z - g)).lpNorm<Eigen::Infinity>();
  }
};

// Bound-projected damped Gauss-Newton on the augmented Lagrangian. The
// quadratic model carries the constraint curvature mu J'J plus the diagonal
// cost curvature; variables pressed against their bounds are frozen, trial
// points stay inside the box by clamping, and a second-order correction
// restores the constraint error of long steps so the stiff penalty cannot
// freeze the tangent space.
int projected_gauss_newton(const AlFunctional& F, Eigen::VectorXd& z,
                           double grad_tol, int max_iter) {
  const int nv = int(z.size());
  double lm = 1e-8;
  z = F.nlp.clamp_to_bounds(z);
  double fz = F.value(z);

  Eigen::MatrixXd H(nv, nv);
  Eigen::LDLT<Eigen::MatrixXd> eq_gram_factor;
  bool have_eq_gram = false;

  auto build_model = [&](const Eigen::VectorXd& at) {
    H.setZero();
    if (F.nlp.cost_hess_diag) {
      const Eigen::VectorXd d = F.nlp.cost_hess_diag(at);
      for (int i = 0; i < nv; ++i) H(i, i) = std::max(d[i], 0.0);
    }
    const Eigen::MatrixXd Je = F.nlp.eq_jac(at);
    if (Je.rows()) accumulate_weighted_gram(Je, F.mu, nullptr, H);
    const Eigen::VectorXd ci = F.nlp.ineq(at);
    if (ci.size()) {
      const Eigen::MatrixXd Ji = F.nlp.ineq_jac(at);
      std::vector<int> active;
      for (int i = 0; i < ci.size(); ++i)
        if (F.nu[i] + F.mu * ci[i] > 0.0) active.push_back(i);
      if (!active.empty()) accumulate_weighted_gram(Ji, F.mu, &active, H);
    }
    H = H.selfadjointView<Eigen::Upper>();
    if (Je.rows()) {
      Eigen::MatrixXd JJt = Je * Je.transpose();
      JJt.diagonal().array() += 1e-10 * (1.0 + JJt.diagonal().maxCoeff());
      eq_gram_factor.compute(JJt);
      have_eq_gram = true;
    } else {
      have_eq_gram = false;
    }
  };

  int it = 0;
  int stall = 0;
  double f_mark = fz;
  for (; it < max_iter; ++it) {
    const Eigen::VectorXd g = F.gradient(z);
    if (F.projected_gradient_norm(z, g) <= grad_tol) break;
    // hand control back to the multiplier loop when progress dries up
    if (fz > f_mark - 1e-10 * (1.0 + std::abs(f_mark))) {
      if (++stall >= 6) break;
    } else {
      stall = 0;
      f_mark = fz;
    }
    build_model(z);

    // freeze variables pressed against an active bound
    std::vector<int> free_set;
    free_set.reserve(nv);
    for (int i = 0; i < nv; ++i) {
      const bool at_lower = F.nlp.lower.size() &&
                            z[i] - F.nlp.lower[i] <= 1e-12 && g[i] > 0.0;
      const bool at_upper = F.nlp.upper.size() &&
                            F.nlp.upper[i] - z[i] <= 1e-12 && g[i] < 0.0;
      if (!at_lower && !at_upper) free_set.push_back(i);
    }
    if (free_set.empty()) break;

    const int nf = int(free_set.size());
    Eigen::MatrixXd Hf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (int a = 0; a < nf; ++a) {
      gf[a] = g[free_set[a]];
      for (int b = 0; b < nf; ++b) Hf(a, b) = H(free_set[a], free_set[b]);
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 14 && !stepped; ++attempt) {
      Eigen::MatrixXd Hd = Hf;
      Hd.diagonal() += lm * Hf.diagonal().cwiseAbs().cwiseMax(1e-8) +
                       Eigen::VectorXd::Constant(nf, 1e-12);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Hd);
      Eigen::VectorXd df = ldlt.solve(-gf);
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(nv);
      for (int a = 0; a < nf; ++a) dir[free_set[a]] = df[a];
      const double dir_deriv = g.dot(dir);
      if (ldlt.info() == Eigen::Success && dir_deriv < 0.0) {
        double step = 1.0;
        for (int ls = 0; ls < 24 && !stepped; ++ls) {
          const Eigen::VectorXd z_new = F.nlp.clamp_to_bounds(z + step * dir);
          const double f_new = F.value(z_new);
          const double budget =
              fz + 1e-4 * std::min(g.dot(z_new - z), step * dir_deriv);
          if (f_new <= budget) {
            z = z_new;
            fz = f_new;
            stepped = true;
            break;
          }
          // second-order correction: restore the constraint error this
          // trial produced before conceding the step length
          if (have_eq_gram) {
            const Eigen::VectorXd ce_trial = F.nlp.eq(z_new);
            if (ce_trial.allFinite()) {
              const Eigen::VectorXd q = -F.nlp.eq_jac(z).transpose() *
                                        eq_gram_factor.solve(ce_trial);
              const Eigen::VectorXd z_soc = F.nlp.clamp_to_bounds(z_new + q);
              const double f_soc = F.value(z_soc);
              if (f_soc <= budget) {
                z = z_soc;
                fz = f_soc;
                stepped = true;
                break;
              }
            }
          }
          step *= 0.5;
        }
      }
      if (!stepped) lm = std::min(lm * 10.0, 1e8);
    }
    if (!stepped) {
      if (trace_enabled())
        printf("    pgn exit no-step it=%d |pg|=%.3e lm=%.1e\n", it,
               F.projected_gradient_norm(z, g), lm);
      break;
    }
    lm = std::max(lm * 0.25, 1e-12);
    if (trace_enabled() && it % 25 == 0)
      printf("    pgn it=%d |pg|=%.3e phi=%.10f lm=%.1e\n", it,
             F.projected_gradient_norm(z, g), fz, lm);
  }
  return it;
}

// Primal-dual Newton polish on the KKT equations over a working set:
// equalities, near-active general inequalities and active bounds enter as
// one equality system (no penalty stiffness); rows whose multipliers come
// out negative are dropped, full steps are taken while the combined KKT
// residual shrinks. Returns true when it improves the iterate.
bool kkt_polish(const NlpProblem& nlp, Eigen::VectorXd& z, double feas_tol,
                int max_iter) {
  const int nv = nlp.num_vars;
  Eigen::VectorXd zc = z;

  auto kkt_norm_at = [&](const Eigen::VectorXd& at) {
    // stationarity with clipped least-squares multipliers on the active set
    const Eigen::VectorXd ce = nlp.eq(at);
    const Eigen::VectorXd ci = nlp.ineq(at);
    const Eigen::MatrixXd Je = nlp.eq_jac(at);
    const Eigen::MatrixXd Ji = nlp.ineq_jac(at);
    const Eigen::VectorXd g = nlp.cost_grad(at);
    std::vector<int> free_set;
    for (int i = 0; i < nv; ++i) {
      const bool bl = nlp.lower.size() && at[i] - nlp.lower[i] <= 1e-9;
      const bool bu = nlp.upper.size() && nlp.upper[i] - at[i] <= 1e-9;
      if (!bl && !bu) free_set.push_back(i);
    }
    std::vector<int> act;
    for (int i = 0; i < ci.size(); ++i)
      if (ci[i] > -1e-7) act.push_back(i);
    const int ne = int(ce.size()), na = int(act.size()),
              nf = int(free_set.size());
    if (nf == 0) return 0.0;
    Eigen::MatrixXd Jt(nf, ne + na);
    Eigen::VectorXd gf(nf);
    for (int r = 0; r < nf; ++r) {
      gf[r] = g[free_set[r]];
      for (int c = 0; c < ne; ++c) Jt(r, c) = Je(c, free_set[r]);
      for (int c = 0; c < na; ++c) Jt(r, ne + c) = Ji(act[c], free_set[r]);
    }
    Eigen::VectorXd mult(ne + na);
    if (ne + na > 0)
      mult = Jt.colPivHouseholderQr().solve(-gf);
    else
      mult.resize(0);
    for (int k = 0; k < na; ++k)
      mult[ne + k] = std::max(0.0, mult[ne + k]);
    double resid = (gf + Jt * mult).lpNorm<Eigen::Infinity>();
    return std::max(resid, nlp.max_violation(at));
  };

  const double score_start = kkt_norm_at(zc);
  double score = score_start;

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd ce = nlp.eq(zc);
    const Eigen::VectorXd ci = nlp.ineq(zc);
    const Eigen::MatrixXd Je = nlp.eq_jac(zc);
    const Eigen::MatrixXd Ji = nlp.ineq_jac(zc);
    const Eigen::VectorXd g = nlp.cost_grad(zc);

    std::vector<int> act_i;
    for (int i = 0; i < ci.size(); ++i)
      if (ci[i] > -1e-7) act_i.push_back(i);
    std::vector<std::pair<int, double>> act_b;
    for (int i = 0; i < nv; ++i) {
      if (nlp.lower.size() && std::isfinite(nlp.lower[i]) &&
          zc[i] - nlp.lower[i] <= 1e-9)
        act_b.push_back({i, nlp.lower[i]});
      else if (nlp.upper.size() && std::isfinite(nlp.upper[i]) &&
               nlp.upper[i] - zc[i] <= 1e-9)
        act_b.push_back({i, nlp.upper[i]});
    }
    const int ne = int(ce.size());

    Eigen::VectorXd d;
    // working-set loop: re-solve after dropping wrong-signed multipliers
    for (int drop = 0; drop < 40; ++drop) {
      const int na = int(act_i.size());
      const int nb = int(act_b.size());
      const int ncs = ne + na + nb;
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(ncs, nv);
      Eigen::VectorXd c(ncs);
      J.topRows(ne) = Je;
      c.head(ne) = ce;
      for (int k = 0; k < na; ++k) {
        J.row(ne + k) = Ji.row(act_i[k]);
        c[ne + k] = ci[act_i[k]];
      }
      for (int k = 0; k < nb; ++k) {
        J(ne + na + k, act_b[k].first) = 1.0;
        c[ne + na + k] = zc[act_b[k].first] - act_b[k].second;
      }

      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv + ncs, nv + ncs);
      if (nlp.cost_hess_diag) {
        const Eigen::VectorXd hd = nlp.cost_hess_diag(zc);
        for (int i = 0; i < nv; ++i) K(i, i) = std::max(hd[i], 0.0) + 1e-9;
      } else {
        for (int i = 0; i < nv; ++i) K(i, i) = 1e-6;
      }
      K.block(0, nv, nv, ncs) = J.transpose();
      K.block(nv, 0, ncs, nv) = J;
      K.block(nv, nv, ncs, ncs).diagonal().setConstant(-1e-11);

      Eigen::VectorXd rhs(nv + ncs);
      rhs.head(nv) = -g;
      rhs.tail(ncs) = -c;
      const Eigen::VectorXd sol =
          Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
      if (!sol.allFinite()) return false;
      d = sol.head(nv);
      const Eigen::VectorXd mult = sol.tail(ncs);

      // bound multiplier sign depends on which bound is active
      int worst = -1;
      double most_negative = -1e-8;
      for (int k = 0; k < na; ++k)
        if (mult[ne + k] < most_negative) {
          most_negative = mult[ne + k];
          worst = ne + k;
        }
      for (int k = 0; k < nb; ++k) {
        const int var = act_b[k].first;
        const bool lower_active =
            nlp.lower.size() && std::isfinite(nlp.lower[var]) &&
            zc[var] - nlp.lower[var] <= 1e-9;
        const double m = mult[ne + na + k];
        const double signed_m = lower_active ? -m : m;  // must be >= 0
        if (signed_m < most_negative) {
          most_negative = signed_m;
          worst = ne + na + k;
        }
      }
      if (worst < 0) break;
      if (worst < ne + na)
        act_i.erase(act_i.begin() + (worst - ne));
      else
        act_b.erase(act_b.begin() + (worst - ne - na));
    }

    const Eigen::VectorXd z_new = nlp.clamp_to_bounds(zc + d);
    const double score_new = kkt_norm_at(z_new);
    if (score_new < score) {
      zc = z_new;
      score = score_new;
    } else {
      break;
    }
    if (d.lpNorm<Eigen::Infinity>() < 1e-13) break;
  }

  const double v_new = nlp.max_violation(zc);
  if (trace_enabled())
    printf("    polish score %.3e -> %.3e viol %.3e\n", score_start, score,
           v_new);
  if (score < score_start && v_new <= std::max(nlp.max_violation(z), feas_tol)) {
    z = zc;
    return true;
  }
  return false;
}

}  // namespace

Eigen::VectorXd solve_augmented_lagrangian(const NlpProblem& nlp,
                                           const AlOptions& options,
                                           AlReport& report) {
  nlp.validate();
  Eigen::VectorXd z = nlp.clamp_to_bounds(nlp.initial_guess);

  AlFunctional F{nlp, Eigen::VectorXd::Zero(nlp.eq(z).size()),
                 Eigen::VectorXd::Zero(nlp.ineq(z).size()), options.mu0};

  report = AlReport{};
  Eigen::VectorXd best = z;
  double best_violation = nlp.max_violation(z);
  double best_cost = nlp.cost(z);
  double prev_violation = std::numeric_limits<double>::infinity();
  double inner_tol = 1e-2;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    report.outer_iterations = outer + 1;
    const double tol_k = std::max(inner_tol, 0.25 * options.grad_tol);
    report.inner_iterations +=
        projected_gauss_newton(F, z, tol_k, options.max_inner);
    if (nlp.max_violation(z) <= 20.0 * options.feas_tol)
      kkt_polish(nlp, z, options.feas_tol, 12);

    const Eigen::VectorXd ce = nlp.eq(z);
    const Eigen::VectorXd ci = nlp.ineq(z);
    const double violation = nlp.max_violation(z);
    const double cost = nlp.cost(z);

    // first-order multiplier update
    F.lambda += F.mu * ce;
    for (int i = 0; i < ci.size(); ++i)
      F.nu[i] = std::max(0.0, F.nu[i] + F.mu * ci[i]);

    // least-squares refinement on the working set: the first-order update
    // stalls once feasible, while boundary rows can carry large multipliers
    const Eigen::MatrixXd Je = nlp.eq_jac(z);
    const Eigen::MatrixXd Ji = nlp.ineq_jac(z);
    {
      // free variables only: bound multipliers live in the projection
      std::vector<int> free_set;
      for (int i = 0; i < nlp.num_vars; ++i) {
        const bool at_lower = nlp.lower.size() && z[i] - nlp.lower[i] <= 1e-10;
        const bool at_upper = nlp.upper.size() && nlp.upper[i] - z[i] <= 1e-10;
        if (!at_lower && !at_upper) free_set.push_back(i);
      }
      std::vector<int> active;
      for (int i = 0; i < ci.size(); ++i)
        if (F.nu[i] > 0.0 || ci[i] > -1e-8) active.push_back(i);
      const int ne = int(ce.size()), na = int(active.size());
      const int nf = int(free_set.size());
      if (ne + na > 0 && nf > 0) {
        Eigen::MatrixXd Jt(nf, ne + na);
        Eigen::VectorXd gf(nf);
        const Eigen::VectorXd g0 = nlp.cost_grad(z);
        for (int r = 0; r < nf; ++r) {
          gf[r] = g0[free_set[r]];
          for (int c = 0; c < ne; ++c) Jt(r, c) = Je(c, free_set[r]);
          for (int c = 0; c < na; ++c)
            Jt(r, ne + c) = Ji(active[c], free_set[r]);
        }
        const Eigen::VectorXd mult = Jt.colPivHouseholderQr().solve(-gf);
        if (mult.allFinite()) {
          F.lambda = mult.head(ne);
          F.nu.setZero();
          for (int k = 0; k < na; ++k)
            F.nu[active[k]] = std::max(0.0, mult[ne + k]);
        }
      }
    }

    // projected KKT residual with the refined multipliers
    Eigen::VectorXd kkt = nlp.cost_grad(z);
    if (ce.size()) kkt += Je.transpose() * F.lambda;
    if (ci.size()) kkt += Ji.transpose() * F.nu;
    const double kkt_norm = F.projected_gradient_norm(z, kkt);

    AlIterate rec{cost, violation, F.mu, kkt_norm, false};
    if (violation < 0.999 * best_violation ||
        (violation <= options.feas_tol &&
         (best_violation > options.feas_tol || cost < best_cost))) {
      rec.accepted = true;
      best = z;
      best_violation = violation;
      best_cost = cost;
    }
    report.trace.push_back(rec);
    report.max_violation = best_violation;
    report.kkt_grad_norm = kkt_norm;

    if (violation <= options.feas_tol && kkt_norm <= options.grad_tol) {
      report.converged = true;
      best = z;
      best_violation = violation;
      break;
    }

    // grow the penalty only while genuinely infeasible; ramping it once
    // the violation sits at the noise floor just stiffens the subproblem
    if (violation > 0.1 * options.feas_tol &&
        violation > 0.5 * prev_violation && F.mu < options.mu_max)
      F.mu = std::min(F.mu * options.mu_growth, options.mu_max);
    prev_violation = violation;
    inner_tol = std::max(0.2 * inner_tol, 0.25 * options.grad_tol);
  }
  report.max_violation = nlp.max_violation(best);
  return best;
}

}  // namespace ppf
