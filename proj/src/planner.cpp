#include "ppf/planner.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/Dense>

#include "ppf/dual.hpp"

namespace ppf {
namespace {

constexpr int kMaxStates = 8;
using StageDual = Dual<10>;  // nx + nu lanes

// ---------------------------------------------------------------------------
// model dynamics, written once over the scalar type

template <typename T>
void manip_time_derivative(const ManipulatorModel& m, const PlanarGeometry& g,
                           const T* x, const T* u, T* f) {
  const T s1 = sin_of(x[4]), c1 = cos_of(x[4]);
  const T s2 = sin_of(x[5]), c2 = cos_of(x[5]);
  const T vx = -m.L1 * x[6] * s1 - m.L2 * x[7] * s2;
  const T vy = m.L1 * x[6] * c1 + m.L2 * x[7] * c2;
  const T ax = -m.L1 * (u[0] * s1 + x[6] * x[6] * c1) -
               m.L2 * (u[1] * s2 + x[7] * x[7] * c2);
  const T ay = m.L1 * (u[0] * c1 - x[6] * x[6] * s1) +
               m.L2 * (u[1] * c2 - x[7] * x[7] * s2);

  const T D = g.sigma - g.omega3 * x[1];
  const T Ddot = (g.sigma_p - g.omega3_p * x[1]) * x[2] - g.omega3 * x[3];
  const T e1v = g.e1.x() * vx + g.e1.y() * vy;
  const T e1pv = g.e1_p.x() * vx + g.e1_p.y() * vy;
  const T e1a = g.e1.x() * ax + g.e1.y() * ay;
  const T e2pv = g.e2_p.x() * vx + g.e2_p.y() * vy;
  const T e2a = g.e2.x() * ax + g.e2.y() * ay;

  f[0] = x[2];
  f[1] = x[3];
  f[2] = (e1pv * x[2] + e1a) / D - e1v * Ddot / (D * D);
  f[3] = e2pv * x[2] + e2a;
  f[4] = x[6];
  f[5] = x[7];
  f[6] = u[0];
  f[7] = u[1];
}

// Only the end-effector speed rows stay as general inequalities; the
// corridor, rate, floor and input limits are plain variable bounds handled
// by projection.
template <typename T>
void manip_node_ineq(const ManipulatorModel& m, const T* x, T* out) {
  const T s1 = sin_of(x[4]), c1 = cos_of(x[4]);
  const T s2 = sin_of(x[5]), c2 = cos_of(x[5]);
  const T vx = -m.L1 * x[6] * s1 - m.L2 * x[7] * s2;
  const T vy = m.L1 * x[6] * c1 + m.L2 * x[7] * c2;
  out[0] = vx - m.velocity_limit;
  out[1] = -m.velocity_limit - vx;
  out[2] = vy - m.velocity_limit;
  out[3] = -m.velocity_limit - vy;
}

template <typename T>
void pm_time_derivative(const PointMassModel&, const PlanarGeometry& g,
                        const T* x, const T* u, T* f) {
  const T D = g.sigma - g.omega3 * x[1];
  const T vx = D * x[2] * g.e1.x() + x[3] * g.e2.x();
  const T vy = D * x[2] * g.e1.y() + x[3] * g.e2.y();
  const T Ddot = (g.sigma_p - g.omega3_p * x[1]) * x[2] - g.omega3 * x[3];
  const T e1v = g.e1.x() * vx + g.e1.y() * vy;
  const T e1pv = g.e1_p.x() * vx + g.e1_p.y() * vy;
  const T e1a = g.e1.x() * u[0] + g.e1.y() * u[1];
  const T e2pv = g.e2_p.x() * vx + g.e2_p.y() * vy;
  const T e2a = g.e2.x() * u[0] + g.e2.y() * u[1];
  f[0] = x[2];
  f[1] = x[3];
  f[2] = (e1pv * x[2] + e1a) / D - e1v * Ddot / (D * D);
  f[3] = e2pv * x[2] + e2a;
}

template <typename T>
void pm_node_ineq(const PointMassModel& m, const PlanarGeometry& g, const T* x,
                  T* out) {
  const T D = g.sigma - g.omega3 * x[1];
  const T vx = D * x[2] * g.e1.x() + x[3] * g.e2.x();
  const T vy = D * x[2] * g.e1.y() + x[3] * g.e2.y();
  out[0] = vx - m.speed_limit;
  out[1] = -m.speed_limit - vx;
  out[2] = vy - m.speed_limit;
  out[3] = -m.speed_limit - vy;
}

// ---------------------------------------------------------------------------

class SpatialModel {
 public:
  virtual ~SpatialModel() = default;
  virtual int nx() const = 0;
  virtual int nu() const = 0;
  virtual int n_node_ineq() const = 0;
  virtual double input_limit() const = 0;
  virtual void f(const PlanarGeometry& g, const double* x, const double* u,
                 double* out) const = 0;
  virtual void f(const PlanarGeometry& g, const StageDual* x,
                 const StageDual* u, StageDual* out) const = 0;
  virtual void node_ineq(const PlanarGeometry& g, const double* x,
                         double* out) const = 0;
  virtual void node_ineq(const PlanarGeometry& g, const StageDual* x,
                         StageDual* out) const = 0;
  // per-state box bounds shared by every node (xi and eta rows are
  // overridden per node by the transcription)
  virtual void state_bounds(double* lo, double* hi) const = 0;
};

class ManipulatorSpatialModel : public SpatialModel {
 public:
  explicit ManipulatorSpatialModel(const ManipulatorModel& m) : m_(m) {}
  int nx() const override { return 8; }
  int nu() const override { return 2; }
  int n_node_ineq() const override { return 4; }
  double input_limit() const override { return m_.joint_accel_limit; }
  void state_bounds(double* lo, double* hi) const override {
    const double inf = std::numeric_limits<double>::infinity();
    const double lo_v[8] = {-inf, -inf, -inf, -inf,
                            -inf, -inf, -m_.joint_rate_limit,
                            -m_.joint_rate_limit};
    const double hi_v[8] = {inf, inf, inf, inf,
                            inf, inf, m_.joint_rate_limit,
                            m_.joint_rate_limit};
    std::copy(lo_v, lo_v + 8, lo);
    std::copy(hi_v, hi_v + 8, hi);
  }
  void f(const PlanarGeometry& g, const double* x, const double* u,
         double* out) const override {
    manip_time_derivative(m_, g, x, u, out);
  }
  void f(const PlanarGeometry& g, const StageDual* x, const StageDual* u,
         StageDual* out) const override {
    manip_time_derivative(m_, g, x, u, out);
  }
  void node_ineq(const PlanarGeometry&, const double* x,
                 double* out) const override {
    manip_node_ineq(m_, x, out);
  }
  void node_ineq(const PlanarGeometry&, const StageDual* x,
                 StageDual* out) const override {
    manip_node_ineq(m_, x, out);
  }

 private:
  ManipulatorModel m_;
};

class PointMassSpatialModel : public SpatialModel {
 public:
  explicit PointMassSpatialModel(const PointMassModel& m) : m_(m) {}
  int nx() const override { return 4; }
  int nu() const override { return 2; }
  int n_node_ineq() const override { return 4; }
  double input_limit() const override { return m_.accel_limit; }
  void state_bounds(double* lo, double* hi) const override {
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      lo[i] = -inf;
      hi[i] = inf;
    }
  }
  void f(const PlanarGeometry& g, const double* x, const double* u,
         double* out) const override {
    pm_time_derivative(m_, g, x, u, out);
  }
  void f(const PlanarGeometry& g, const StageDual* x, const StageDual* u,
         StageDual* out) const override {
    pm_time_derivative(m_, g, x, u, out);
  }
  void node_ineq(const PlanarGeometry& g, const double* x,
                 double* out) const override {
    pm_node_ineq(m_, g, x, out);
  }
  void node_ineq(const PlanarGeometry& g, const StageDual* x,
                 StageDual* out) const override {
    pm_node_ineq(m_, g, x, out);
  }

 private:
  PointMassModel m_;
};

// ---------------------------------------------------------------------------

struct Transcription {
  std::shared_ptr<const SpatialModel> model;
  std::vector<double> grid;
  std::vector<PlanarGeometry> geom_node;
  std::vector<PlanarGeometry> geom_mid;
  std::vector<double> eta_lo, eta_hi;
  int N = 0, nx = 0, nu = 0;
  double floor = 1e-4;
  Eigen::VectorXd x_start;          // full pin at node 0
  std::vector<int> end_idx;         // pinned components at node N
  Eigen::VectorXd end_val;

  int ix(int i) const { return i * nx; }
  int iu(int i) const { return (N + 1) * nx + i * nu; }
  int vars() const { return (N + 1) * nx + N * nu; }
  int n_eq() const { return N * nx + nx + int(end_idx.size()); }
  int n_ineq() const { return (N + 1) * model->n_node_ineq(); }

  // box bounds: model state box per node, corridor bounds on eta, the
  // progress-rate floor, and the input limits
  void fill_bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    const double inf = std::numeric_limits<double>::infinity();
    lo = Eigen::VectorXd::Constant(vars(), -inf);
    hi = Eigen::VectorXd::Constant(vars(), inf);
    double slo[kMaxStates], shi[kMaxStates];
    model->state_bounds(slo, shi);
    for (int i = 0; i <= N; ++i) {
      for (int n = 0; n < nx; ++n) {
        lo[ix(i) + n] = slo[n];
        hi[ix(i) + n] = shi[n];
      }
      lo[ix(i) + 1] = std::max(slo[1], eta_lo[i]);
      hi[ix(i) + 1] = std::min(shi[1], eta_hi[i]);
      lo[ix(i) + 2] = std::max(slo[2], floor);
    }
    const double lim = model->input_limit();
    for (int i = 0; i < N; ++i)
      for (int n = 0; n < nu; ++n) {
        lo[iu(i) + n] = -lim;
        hi[iu(i) + n] = lim;
      }
  }

  template <typename T>
  void rk4(int i, const T* x0, const T* u, T* out) const {
    const double h = grid[i + 1] - grid[i];
    T k1[kMaxStates], k2[kMaxStates], k3[kMaxStates], k4[kMaxStates],
        tmp[kMaxStates];
    auto xprime = [&](const PlanarGeometry& g, const T* x, T* k) {
      T f[kMaxStates];
      model->f(g, x, u, f);
      for (int n = 0; n < nx; ++n) k[n] = f[n] / x[2];
    };
    xprime(geom_node[i], x0, k1);
    for (int n = 0; n < nx; ++n) tmp[n] = x0[n] + (0.5 * h) * k1[n];
    xprime(geom_mid[i], tmp, k2);
    for (int n = 0; n < nx; ++n) tmp[n] = x0[n] + (0.5 * h) * k2[n];
    xprime(geom_mid[i], tmp, k3);
    for (int n = 0; n < nx; ++n) tmp[n] = x0[n] + h * k3[n];
    xprime(geom_node[i + 1], tmp, k4);
    for (int n = 0; n < nx; ++n)
      out[n] = x0[n] + (h / 6.0) * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
  }

  double cost(const Eigen::VectorXd& z) const {
    double T_total = 0.0;
    for (int i = 0; i <= N; ++i) {
      const double xd = z[ix(i) + 2];
      if (xd <= 0.0) return std::numeric_limits<double>::infinity();
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      T_total += w * (grid[1] - grid[0]) / xd;
    }
    return T_total;
  }

  Eigen::VectorXd cost_hess_diag(const Eigen::VectorXd& z) const {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(vars());
    for (int i = 0; i <= N; ++i) {
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      const double xd = z[ix(i) + 2];
      h[ix(i) + 2] = 2.0 * w * (grid[1] - grid[0]) / (xd * xd * xd);
    }
    return h;
  }

  Eigen::VectorXd cost_grad(const Eigen::VectorXd& z) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(vars());
    for (int i = 0; i <= N; ++i) {
      const double w = (i == 0 || i == N) ? 0.5 : 1.0;
      const double xd = z[ix(i) + 2];
      g[ix(i) + 2] = -w * (grid[1] - grid[0]) / (xd * xd);
    }
    return g;
  }

  Eigen::VectorXd eq(const Eigen::VectorXd& z) const {
    Eigen::VectorXd r(n_eq());
    const double defect_scale = 1.0 / (grid[1] - grid[0]);
    int row = 0;
    double pred[kMaxStates];
    for (int i = 0; i < N; ++i) {
      rk4(i, z.data() + ix(i), z.data() + iu(i), pred);
      for (int n = 0; n < nx; ++n)
        r[row++] = defect_scale * (z[ix(i + 1) + n] - pred[n]);
    }
    for (int n = 0; n < nx; ++n) r[row++] = z[ix(0) + n] - x_start[n];
    for (size_t k = 0; k < end_idx.size(); ++k)
      r[row++] = z[ix(N) + end_idx[k]] - end_val[int(k)];
    return r;
  }

  Eigen::MatrixXd eq_jac(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_eq(), vars());
    StageDual xd[kMaxStates], ud[2], pred[kMaxStates];
    int row = 0;
    for (int i = 0; i < N; ++i) {
      for (int n = 0; n < nx; ++n) xd[n] = StageDual::seed(z[ix(i) + n], n);
      for (int n = 0; n < nu; ++n)
        ud[n] = StageDual::seed(z[iu(i) + n], nx + n);
      rk4(i, xd, ud, pred);
      const double defect_scale = 1.0 / (grid[1] - grid[0]);
      for (int n = 0; n < nx; ++n) {
        J(row, ix(i + 1) + n) = defect_scale;
        for (int k = 0; k < nx; ++k)
          J(row, ix(i) + k) = -defect_scale * pred[n].g[k];
        for (int k = 0; k < nu; ++k)
          J(row, iu(i) + k) = -defect_scale * pred[n].g[nx + k];
        ++row;
      }
    }
    for (int n = 0; n < nx; ++n) J(row++, ix(0) + n) = 1.0;
    for (size_t k = 0; k < end_idx.size(); ++k)
      J(row++, ix(N) + end_idx[k]) = 1.0;
    return J;
  }

  Eigen::VectorXd ineq(const Eigen::VectorXd& z) const {
    Eigen::VectorXd r(n_ineq());
    const int nn = model->n_node_ineq();
    int row = 0;
    double buf[16];
    for (int i = 0; i <= N; ++i) {
      model->node_ineq(geom_node[i], z.data() + ix(i), buf);
      for (int k = 0; k < nn; ++k) r[row++] = buf[k];
    }
    return r;
  }

  Eigen::MatrixXd ineq_jac(const Eigen::VectorXd& z) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_ineq(), vars());
    const int nn = model->n_node_ineq();
    StageDual xd[kMaxStates], buf[16];
    int row = 0;
    for (int i = 0; i <= N; ++i) {
      for (int n = 0; n < nx; ++n) xd[n] = StageDual::seed(z[ix(i) + n], n);
      model->node_ineq(geom_node[i], xd, buf);
      for (int k = 0; k < nn; ++k) {
        for (int n = 0; n < nx; ++n) J(row, ix(i) + n) = buf[k].g[n];
        ++row;
      }
    }
    return J;
  }
};

NlpProblem wrap(std::shared_ptr<Transcription> tr, Eigen::VectorXd guess) {
  NlpProblem nlp;
  nlp.num_vars = tr->vars();
  nlp.n_states = tr->nx;
  nlp.n_inputs = tr->nu;
  nlp.n_nodes = tr->N;
  nlp.grid = tr->grid;
  nlp.initial_guess = std::move(guess);
  nlp.cost = [tr](const Eigen::VectorXd& z) { return tr->cost(z); };
  nlp.cost_grad = [tr](const Eigen::VectorXd& z) { return tr->cost_grad(z); };
  nlp.eq = [tr](const Eigen::VectorXd& z) { return tr->eq(z); };
  nlp.eq_jac = [tr](const Eigen::VectorXd& z) { return tr->eq_jac(z); };
  nlp.ineq = [tr](const Eigen::VectorXd& z) { return tr->ineq(z); };
  nlp.ineq_jac = [tr](const Eigen::VectorXd& z) { return tr->ineq_jac(z); };
  nlp.cost_hess_diag = [tr](const Eigen::VectorXd& z) {
    return tr->cost_hess_diag(z);
  };
  tr->fill_bounds(nlp.lower, nlp.upper);
  return nlp;
}

std::shared_ptr<Transcription> make_transcription(
    std::shared_ptr<const SpatialModel> model, const ParametricCurve& curve,
    const FrameField& frames, const PlanarCorridor& corridor, int N,
    double floor) {
  if (N < 10) throw TranscriptionError("transcribe: N must be >= 10");
  auto tr = std::make_shared<Transcription>();
  tr->model = model;
  tr->N = N;
  tr->nx = model->nx();
  tr->nu = model->nu();
  tr->floor = floor;
  const double xi0 = curve.theta_min(), xi1 = curve.theta_max();
  tr->grid.resize(N + 1);
  for (int i = 0; i <= N; ++i)
    tr->grid[i] = xi0 + (xi1 - xi0) * double(i) / N;
  tr->geom_node.resize(N + 1);
  tr->geom_mid.resize(N);
  tr->eta_lo.resize(N + 1);
  tr->eta_hi.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    tr->geom_node[i] = planar_geometry(curve, frames, tr->grid[i]);
    tr->eta_lo[i] = corridor.eval_lower(tr->grid[i]);
    tr->eta_hi[i] = corridor.eval_upper(tr->grid[i]);
  }
  for (int i = 0; i < N; ++i)
    tr->geom_mid[i] =
        planar_geometry(curve, frames, 0.5 * (tr->grid[i] + tr->grid[i + 1]));
  return tr;
}

}  // namespace

Vec2 manipulator_position(const ManipulatorModel& m, double th1, double th2) {
  return Vec2(m.L1 * std::cos(th1) + m.L2 * std::cos(th2),
              m.L1 * std::sin(th1) + m.L2 * std::sin(th2));
}

Vec2 manipulator_velocity(const ManipulatorModel& m,
                          const Eigen::VectorXd& state) {
  if (state.size() < 8)
    throw std::invalid_argument("manipulator_velocity: 8-state vector expected");
  const double th1 = state[4], th2 = state[5];
  const double w1 = state[6], w2 = state[7];
  return Vec2(-m.L1 * w1 * std::sin(th1) - m.L2 * w2 * std::sin(th2),
              m.L1 * w1 * std::cos(th1) + m.L2 * w2 * std::cos(th2));
}

Vec2 manipulator_ik(const ManipulatorModel& m, const Vec2& p) {
  const double r = p.norm();
  if (r > m.L1 + m.L2 - 1e-9 || r < std::abs(m.L1 - m.L2) + 1e-9)
    throw TranscriptionError("manipulator_ik: point out of reach, |p| = " +
                             std::to_string(r));
  const double phi = std::atan2(p.y(), p.x());
  const double alpha =
      std::acos((m.L1 * m.L1 + r * r - m.L2 * m.L2) / (2.0 * m.L1 * r));
  const double th1 = phi + alpha;  // elbow-up branch, fixed
  const Vec2 joint(m.L1 * std::cos(th1), m.L1 * std::sin(th1));
  const double th2 = std::atan2(p.y() - joint.y(), p.x() - joint.x());
  return Vec2(th1, th2);
}

Vec2 manipulator_ik_velocity(const ManipulatorModel& m, const Vec2& angles,
                             const Vec2& v) {
  const double s1 = std::sin(angles.x()), c1 = std::cos(angles.x());
  const double s2 = std::sin(angles.y()), c2 = std::cos(angles.y());
  Eigen::Matrix2d J;
  J << -m.L1 * s1, -m.L2 * s2, m.L1 * c1, m.L2 * c2;
  if (std::abs(J.determinant()) < 1e-9)
    throw TranscriptionError("manipulator_ik_velocity: singular configuration");
  return J.inverse() * v;
}

PlanarGeometry planar_geometry(const ParametricCurve& curve,
                               const FrameField& frames, double xi) {
  const FrameSample f = frame_at(frames, xi);
  const TangentJet jet = tangent_jet(curve, xi);
  PlanarGeometry g;
  g.xi = xi;
  g.sigma = jet.sigma;
  g.sigma_p = jet.sigma_p;
  g.e1 = f.e1().head<2>();
  g.e2 = f.e2().head<2>();
  FrameSample smp = f;
  if (!smp.enriched) smp = ptf_enrich(curve, xi, f.R);
  g.e1_p = smp.R_prime.col(0).head<2>();
  g.e2_p = smp.R_prime.col(1).head<2>();
  g.omega3 = smp.omega_path[2];
  // path-frame angular acceleration from the world quantities
  const Vec3 alpha_path =
      smp.R.transpose() * (smp.alpha_world - smp.R_prime * smp.omega_path);
  g.omega3_p = alpha_path[2];
  return g;
}

Eigen::VectorXd spatialize(const ManipulatorModel& m,
                           const ParametricCurve& curve,
                           const FrameField& frames,
                           const Eigen::VectorXd& state, const Vec2& u,
                           double xi_dot_floor) {
  if (state.size() != 8)
    throw std::invalid_argument("spatialize: 8-state vector expected");
  if (state[2] <= xi_dot_floor)
    throw StallError("spatialize: xi_dot " + std::to_string(state[2]) +
                     " at or below the floor " + std::to_string(xi_dot_floor));
  const PlanarGeometry g = planar_geometry(curve, frames, state[0]);
  double f[kMaxStates], uu[2] = {u.x(), u.y()};
  manip_time_derivative(m, g, state.data(), uu, f);
  Eigen::VectorXd out(8);
  for (int n = 0; n < 8; ++n) out[n] = f[n] / state[2];
  return out;
}

NlpProblem transcribe(const ManipulatorModel& m, const ParametricCurve& curve,
                      const FrameField& frames, const PlanarCorridor& corridor,
                      int N, const TranscribeOptions& options) {
  auto model = std::make_shared<ManipulatorSpatialModel>(m);
  auto tr = make_transcription(model, curve, frames, corridor, N,
                               options.xi_dot_floor);

  // Boundary states: on the path, moving tangentially at boundary_speed.
  auto boundary_state = [&](const PlanarGeometry& g) {
    const Vec2 p = curve.eval(g.xi, 0).head<2>();
    const Vec2 th = manipulator_ik(m, p);  // throws if unreachable
    const Vec2 v = options.boundary_speed * g.e1;
    const Vec2 thd = manipulator_ik_velocity(m, th, v);
    Eigen::VectorXd x(8);
    x << g.xi, 0.0, options.boundary_speed / g.sigma, 0.0, th.x(), th.y(),
        thd.x(), thd.y();
    return x;
  };
  tr->x_start = boundary_state(tr->geom_node.front());
  const Eigen::VectorXd x_end = boundary_state(tr->geom_node.back());
  tr->end_idx = {1, 2, 3, 4, 5, 6, 7};  // everything except xi itself
  tr->end_val = Eigen::VectorXd(7);
  for (size_t k = 0; k < tr->end_idx.size(); ++k)
    tr->end_val[int(k)] = x_end[tr->end_idx[k]];

  // Path-tracking guess at the fastest constant xi_dot within |v| <= limit.
  double xd_const = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= N; ++i) {
    const PlanarGeometry& g = tr->geom_node[i];
    const double comp = std::max(std::abs(g.e1.x()), std::abs(g.e1.y()));
    xd_const = std::min(xd_const, m.velocity_limit / (g.sigma * comp));
  }
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(tr->vars());
  std::vector<Vec2> thd(N + 1);
  for (int i = 0; i <= N; ++i) {
    const PlanarGeometry& g = tr->geom_node[i];
    const Vec2 p = curve.eval(g.xi, 0).head<2>();
    const Vec2 th = manipulator_ik(m, p);
    thd[i] = manipulator_ik_velocity(m, th,
                                     Vec2(curve.eval(g.xi, 1).head<2>()) * xd_const);
    guess.segment(tr->ix(i), 8) << g.xi, 0.0, xd_const, 0.0, th.x(), th.y(),
        thd[i].x(), thd[i].y();
  }
  const double dxi = tr->grid[1] - tr->grid[0];
  for (int i = 0; i < N; ++i) {
    const Vec2 u = (thd[i + 1] - thd[i]) / dxi * xd_const;
    guess.segment(tr->iu(i), 2) = u;
  }
  return wrap(tr, std::move(guess));
}

NlpProblem transcribe(const PointMassModel& m, const ParametricCurve& curve,
                      const FrameField& frames, const PlanarCorridor& corridor,
                      int N, const PointMassBoundary& boundary,
                      double xi_dot_floor) {
  auto model = std::make_shared<PointMassSpatialModel>(m);
  auto tr = make_transcription(model, curve, frames, corridor, N, xi_dot_floor);

  const PlanarGeometry& g0 = tr->geom_node.front();
  const PlanarGeometry& gN = tr->geom_node.back();
  tr->x_start = Eigen::VectorXd(4);
  tr->x_start << g0.xi, 0.0, boundary.speed_start / g0.sigma, 0.0;
  tr->end_idx = {1, 2, 3};
  tr->end_val = Eigen::VectorXd(3);
  tr->end_val << 0.0, boundary.speed_end / gN.sigma, 0.0;

  double xd_const = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= N; ++i) {
    const PlanarGeometry& g = tr->geom_node[i];
    const double comp = std::max(std::abs(g.e1.x()), std::abs(g.e1.y()));
    xd_const = std::min(xd_const, 0.9 * m.speed_limit / (g.sigma * comp));
  }
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(tr->vars());
  for (int i = 0; i <= N; ++i)
    guess.segment(tr->ix(i), 4) << tr->grid[i], 0.0, xd_const, 0.0;
  return wrap(tr, std::move(guess));
}

Trajectory solve(const NlpProblem& nlp, const AlOptions& options) {
  Trajectory traj;
  Eigen::VectorXd z = solve_augmented_lagrangian(nlp, options, traj.report);

  const int N = nlp.n_nodes, nx = nlp.n_states, nu = nlp.n_inputs;
  traj.xi = nlp.grid;
  traj.states = Eigen::MatrixXd(N + 1, nx);
  traj.inputs = Eigen::MatrixXd(N, nu);
  for (int i = 0; i <= N; ++i)
    traj.states.row(i) = z.segment(i * nx, nx).transpose();
  for (int i = 0; i < N; ++i)
    traj.inputs.row(i) = z.segment((N + 1) * nx + i * nu, nu).transpose();

  const double dxi = nlp.grid[1] - nlp.grid[0];
  traj.total_time = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double w = (i == 0 || i == N) ? 0.5 : 1.0;
    traj.total_time += w * dxi / traj.states(i, 2);
  }
  traj.max_violation = nlp.max_violation(z);  // independent revalidation
  return traj;
}

Eigen::VectorXd refine_guess(const Trajectory& coarse, const NlpProblem& fine) {
  const int Nc = int(coarse.xi.size()) - 1;
  const int Nf = fine.n_nodes, nx = fine.n_states, nu = fine.n_inputs;
  if (coarse.states.cols() != nx || coarse.inputs.cols() != nu)
    throw std::invalid_argument("refine_guess: model dimensions differ");
  Eigen::VectorXd guess(fine.num_vars);
  for (int i = 0; i <= Nf; ++i) {
    const double s = double(i) / Nf * Nc;
    const int k = std::min(int(s), Nc - 1);
    const double a = s - k;
    guess.segment(i * nx, nx) =
        ((1.0 - a) * coarse.states.row(k) + a * coarse.states.row(k + 1))
            .transpose();
    guess[i * nx] = fine.grid[i];  // xi is the grid itself
  }
  for (int i = 0; i < Nf; ++i) {
    const int k = std::min(int(double(i) / Nf * Nc), Nc - 1);
    guess.segment((Nf + 1) * nx + i * nu, nu) = coarse.inputs.row(k).transpose();
  }
  return guess;
}

std::string trajectory_to_csv(const ManipulatorModel& m,
                              const Trajectory& traj) {
  std::string out =
      "xi,t,eta,xi_dot,th1,th2,th1_dot,th2_dot,th1_ddot,th2_ddot,p_x,p_y,v\n";
  char buf[512];
  const int N = int(traj.xi.size()) - 1;
  double t = 0.0;
  for (int i = 0; i <= N; ++i) {
    if (i > 0) {
      const double dxi = traj.xi[i] - traj.xi[i - 1];
      t += 0.5 * dxi *
           (1.0 / traj.states(i - 1, 2) + 1.0 / traj.states(i, 2));
    }
    const Vec2 p =
        manipulator_position(m, traj.states(i, 4), traj.states(i, 5));
    const Vec2 v = manipulator_velocity(m, traj.states.row(i).transpose());
    const int iu = std::min(i, N - 1);
    snprintf(buf, sizeof(buf),
             "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
             "%.17g,%.17g,%.17g\n",
             traj.xi[i], t, traj.states(i, 1), traj.states(i, 2),
             traj.states(i, 4), traj.states(i, 5), traj.states(i, 6),
             traj.states(i, 7), traj.inputs(iu, 0), traj.inputs(iu, 1), p.x(),
             p.y(), v.norm());
    out += buf;
  }
  return out;
}

}  // namespace ppf
