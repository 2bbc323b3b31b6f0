#include "ppf/frames.hpp"

#include <algorithm>
#include <cmath>

namespace ppf {

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& w) {
  const double angle = w.norm();
  const Mat3 W = skew(w);
  if (angle < 1e-8) {
    // series keeps the small-angle branch free of 1/angle loss
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + s * W + c * W * W;
}

Vec3 ptf_angular_velocity(const Vec3& e1_prime, const Mat3& R) {
  return Vec3(0.0, -e1_prime.dot(R.col(2)), e1_prime.dot(R.col(1)));
}

Mat3 so3_exp_step(const Mat3& R, const Vec3& omega_world, double dtheta) {
  if (omega_world.norm() * std::abs(dtheta) >= M_PI)
    throw StepSizeError("so3_exp_step: |omega|*dtheta reaches a half turn");
  return so3_exp(omega_world * dtheta) * R;
}

Mat3 initial_frame(const ParametricCurve& curve) {
  const double t0 = curve.theta_min();
  const Vec3 e1 = curve.eval(t0, 1) / curve.parametric_speed(t0);
  Vec3 e2, e3;
  if (curve.dimension() == 2) {
    e3 = Vec3::UnitZ();
    e2 = e3.cross(e1);
  } else {
    int axis = 0;
    double best = std::abs(e1.x());
    for (int i = 1; i < 3; ++i) {
      const double a = std::abs(e1[i]);
      if (a < best) {
        best = a;
        axis = i;
      }
    }
    const Vec3 a = Vec3::Unit(axis);
    e2 = (a - a.dot(e1) * e1).normalized();
    e3 = e1.cross(e2);
  }
  Mat3 R;
  R.col(0) = e1;
  R.col(1) = e2;
  R.col(2) = e3;
  return R;
}

TangentJet tangent_jet(const ParametricCurve& curve, double theta,
                       bool left_limit) {
  const Vec3 u = curve.eval_one_sided(theta, 1, left_limit);
  const Vec3 a = curve.eval_one_sided(theta, 2, left_limit);
  const Vec3 b = curve.eval_one_sided(theta, 3, left_limit);
  const Vec3 q = curve.eval_one_sided(theta, 4, left_limit);

  TangentJet jet;
  const double s = u.dot(u);
  const double sigma = std::sqrt(s);
  if (sigma < 1e-12)
    throw std::runtime_error("tangent_jet: degenerate parametric speed");
  const double sp = 2.0 * u.dot(a);
  const double spp = 2.0 * (a.dot(a) + u.dot(b));
  const double sppp = 2.0 * (3.0 * a.dot(b) + u.dot(q));

  jet.sigma = sigma;
  jet.sigma_p = sp / (2.0 * sigma);
  jet.sigma_pp = spp / (2.0 * sigma) - sp * sp / (4.0 * s * sigma);
  jet.sigma_ppp = sppp / (2.0 * sigma) - 3.0 * sp * spp / (4.0 * s * sigma) +
                  3.0 * sp * sp * sp / (8.0 * s * s * sigma);

  const double rho = 1.0 / sigma;
  const double rho_p = -jet.sigma_p * rho * rho;
  const double rho_pp =
      -jet.sigma_pp * rho * rho + 2.0 * jet.sigma_p * jet.sigma_p * rho * rho * rho;
  const double rho_ppp = -jet.sigma_ppp * rho * rho +
                         6.0 * jet.sigma_p * jet.sigma_pp * rho * rho * rho -
                         6.0 * std::pow(jet.sigma_p, 3) * std::pow(rho, 4);

  jet.e1 = u * rho;
  jet.e1_p = a * rho + u * rho_p;
  jet.e1_pp = b * rho + 2.0 * a * rho_p + u * rho_pp;
  jet.e1_ppp = q * rho + 3.0 * b * rho_p + 3.0 * a * rho_pp + u * rho_ppp;
  return jet;
}

namespace {

// Fills omega/alpha/jerk (world), R', R'' for an adapted frame R at theta
// whose path-frame angular velocity is omega_path. alpha1/jerk1 are the
// derivatives of the first path-frame component (0 for PTF, (sigma*tau)'
// and (sigma*tau)'' for FSF).
void enrich(const ParametricCurve& curve, double theta, bool left_limit,
            double alpha1, double jerk1, FrameSample& smp) {
  const TangentJet jet = tangent_jet(curve, theta, left_limit);
  const Mat3& R = smp.R;
  smp.omega_world = R * smp.omega_path;
  smp.R_prime = skew(smp.omega_world) * R;

  const Vec3 e2 = R.col(1), e3 = R.col(2);
  const Vec3 e2_p = smp.R_prime.col(1), e3_p = smp.R_prime.col(2);
  const Vec3 alpha_path(alpha1,
                        -(jet.e1_pp.dot(e3) + jet.e1_p.dot(e3_p)),
                        jet.e1_pp.dot(e2) + jet.e1_p.dot(e2_p));
  smp.alpha_world = R * alpha_path + smp.R_prime * smp.omega_path;
  smp.R_dprime = skew(smp.alpha_world) * R + skew(smp.omega_world) * smp.R_prime;

  const Vec3 e2_pp = smp.R_dprime.col(1), e3_pp = smp.R_dprime.col(2);
  const Vec3 jerk_path(
      jerk1,
      -(jet.e1_ppp.dot(e3) + 2.0 * jet.e1_pp.dot(e3_p) + jet.e1_p.dot(e3_pp)),
      jet.e1_ppp.dot(e2) + 2.0 * jet.e1_pp.dot(e2_p) + jet.e1_p.dot(e2_pp));
  smp.jerk_world =
      R * jerk_path + 2.0 * smp.R_prime * alpha_path + smp.R_dprime * smp.omega_path;
  smp.enriched = true;
}

}  // namespace

Mat3 adapt_frame(const Mat3& R, const Vec3& tangent) {
  const Vec3 e1 = tangent;
  Vec3 e2 = R.col(1) - e1.dot(R.col(1)) * e1;
  const double n = e2.norm();
  if (n < 1e-12)
    throw std::runtime_error("adapt_frame: frame collapsed onto the tangent");
  e2 /= n;
  Mat3 out;
  out.col(0) = e1;
  out.col(1) = e2;
  out.col(2) = e1.cross(e2);
  return out;
}

FsfSample fsf_frame(const ParametricCurve& curve, double theta,
                    bool left_limit) {
  if (theta < curve.theta_min() || theta > curve.theta_max())
    throw std::domain_error("fsf_frame: theta outside curve domain");
  const Vec3 u = curve.eval_one_sided(theta, 1, left_limit);
  const Vec3 a = curve.eval_one_sided(theta, 2, left_limit);
  const Vec3 b = curve.eval_one_sided(theta, 3, left_limit);
  const Vec3 q = curve.eval_one_sided(theta, 4, left_limit);
  const Vec3 q5 = curve.eval_one_sided(theta, 5, left_limit);

  const double sigma = u.norm();
  if (sigma < 1e-12)
    throw std::runtime_error("fsf_frame: degenerate parametric speed");
  const Vec3 w = u.cross(a);
  const double wn = w.norm();
  if (wn < 1e-9 * sigma * sigma * sigma)
    throw FsfSingularityError("fsf_frame: curvature vanishes at theta " +
                              std::to_string(theta));

  FsfSample out;
  out.kappa = wn / (sigma * sigma * sigma);
  out.tau = w.dot(b) / (wn * wn);

  FrameSample& smp = out.frame;
  smp.theta = theta;
  smp.R.col(0) = u / sigma;
  smp.R.col(2) = w / wn;
  smp.R.col(1) = smp.R.col(2).cross(smp.R.col(0));
  smp.omega_path = sigma * Vec3(out.tau, 0.0, out.kappa);

  // (sigma*tau)' and (sigma*tau)'' for the twist components of alpha/jerk.
  const Vec3 w_p = u.cross(b);
  const Vec3 w_pp = a.cross(b) + u.cross(q);
  const double s1 = w.dot(b);
  const double s1_p = w_p.dot(b) + w.dot(q);
  const double s1_pp = w_pp.dot(b) + 2.0 * w_p.dot(q) + w.dot(q5);
  const double W = w.dot(w);
  const double W_p = 2.0 * w.dot(w_p);
  const double W_pp = 2.0 * (w_p.dot(w_p) + w.dot(w_pp));
  const TangentJet jet = tangent_jet(curve, theta, left_limit);
  const double r = s1 / W;
  const double r_p = s1_p / W - s1 * W_p / (W * W);
  const double r_pp = s1_pp / W - 2.0 * s1_p * W_p / (W * W) -
                      s1 * W_pp / (W * W) + 2.0 * s1 * W_p * W_p / (W * W * W);
  const double st_p = jet.sigma_p * r + jet.sigma * r_p;
  const double st_pp = jet.sigma_pp * r + 2.0 * jet.sigma_p * r_p + jet.sigma * r_pp;

  enrich(curve, theta, left_limit, st_p, st_pp, smp);
  return out;
}

FrameField ptfi(std::shared_ptr<const ParametricCurve> curve,
                std::vector<double> grid, const Mat3& R0) {
  if (!curve) throw std::invalid_argument("ptfi: null curve");
  if (grid.size() < 2) throw std::invalid_argument("ptfi: grid needs 2+ nodes");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("ptfi: grid must strictly increase");
  if (grid.front() < curve->theta_min() || grid.back() > curve->theta_max())
    throw std::domain_error("ptfi: grid outside curve domain");
  if ((R0.transpose() * R0 - Mat3::Identity()).norm() > 1e-9)
    throw std::invalid_argument("ptfi: R0 not orthonormal");
  {
    const Vec3 t0 = curve->eval(grid.front(), 1) / curve->parametric_speed(grid.front());
    if ((R0.col(0) - t0).norm() > 1e-9)
      throw std::invalid_argument("ptfi: R0 not adapted at grid[0]");
  }

  FrameField field;
  field.kind = FrameKind::Ptf;
  field.curve = curve;
  field.grid = std::move(grid);
  field.samples.resize(field.grid.size());

  Mat3 R = R0;
  double drift = 0.0;
  for (size_t i = 0; i < field.grid.size(); ++i) {
    const double theta = field.grid[i];
    const TangentJet jet = tangent_jet(*curve, theta);
    FrameSample& smp = field.samples[i];
    smp.theta = theta;
    smp.R = R;
    smp.omega_path = ptf_angular_velocity(jet.e1_p, R);
    smp.omega_world = R * smp.omega_path;
    if (i + 1 < field.grid.size()) {
      const double dtheta = field.grid[i + 1] - theta;
      Mat3 next = so3_exp_step(R, smp.omega_world, dtheta);
      const TangentJet jn = tangent_jet(*curve, field.grid[i + 1]);
      drift = std::max(drift, (next.col(0) - jn.e1).norm());
      R = adapt_frame(next, jn.e1);
    }
  }
  field.max_adaptation_drift = drift;
  return field;
}

FrameField ptfi_uniform(std::shared_ptr<const ParametricCurve> curve,
                        int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("ptfi_uniform: n_steps < 1");
  std::vector<double> grid(n_steps + 1);
  const double t0 = curve->theta_min(), t1 = curve->theta_max();
  for (int i = 0; i <= n_steps; ++i)
    grid[i] = t0 + (t1 - t0) * double(i) / n_steps;
  return ptfi(curve, std::move(grid), initial_frame(*curve));
}

FrameSample ptf_enrich(const ParametricCurve& curve, double theta,
                       const Mat3& R, bool left_limit) {
  FrameSample smp;
  smp.theta = theta;
  smp.R = R;
  const TangentJet jet = tangent_jet(curve, theta, left_limit);
  smp.omega_path = ptf_angular_velocity(jet.e1_p, R);
  enrich(curve, theta, left_limit, 0.0, 0.0, smp);
  return smp;
}

FrameField ptfd(const FrameField& field, const PtfdOptions& opts) {
  if (field.kind != FrameKind::Ptf)
    throw std::invalid_argument("ptfd: field must come from ptfi");
  const ParametricCurve& curve = *field.curve;
  if (opts.require_continuity) {
    if (curve.continuity_class() < 3)
      throw ContinuityError(
          "ptfd: angular acceleration requires a C3 curve, got C" +
          std::to_string(curve.continuity_class()));
    if (curve.continuity_class() < 4)
      throw ContinuityError("ptfd: angular jerk requires a C4 curve, got C" +
                            std::to_string(curve.continuity_class()));
  }
  FrameField out = field;
  for (auto& smp : out.samples) smp = ptf_enrich(curve, smp.theta, smp.R);
  return out;
}

FrameSample frame_at(const FrameField& field, double theta) {
  if (field.grid.empty()) throw std::invalid_argument("frame_at: empty field");
  if (theta < field.grid.front() || theta > field.grid.back())
    throw std::domain_error("frame_at: theta outside the field span");

  auto it = std::lower_bound(field.grid.begin(), field.grid.end(), theta);
  if (it != field.grid.end() && *it == theta)
    return field.samples[size_t(it - field.grid.begin())];

  const size_t i = size_t(it - field.grid.begin()) - 1;
  const FrameSample& base = field.samples[i];

  if (field.kind == FrameKind::Fsf)
    return fsf_frame(*field.curve, theta).frame;

  Mat3 R = so3_exp_step(base.R, base.omega_world, theta - base.theta);
  const TangentJet jet = tangent_jet(*field.curve, theta);
  R = adapt_frame(R, jet.e1);
  return ptf_enrich(*field.curve, theta, R);
}

}  // namespace ppf
