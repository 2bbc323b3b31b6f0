#include "ppf/spatial.hpp"

#include <algorithm>
#include <cmath>

namespace ppf {
namespace {

double g_value(const ParametricCurve& curve, const Vec3& p, double theta) {
  return (p - curve.eval_unchecked_order(theta, 0))
      .dot(curve.eval_unchecked_order(theta, 1));
}

// g' = -(sigma^2 - d.gamma'')
double g_slope(const ParametricCurve& curve, const Vec3& p, double theta) {
  const Vec3 u = curve.eval_unchecked_order(theta, 1);
  const Vec3 d = p - curve.eval_unchecked_order(theta, 0);
  return -u.squaredNorm() + d.dot(curve.eval_unchecked_order(theta, 2));
}

double converged_tol(const ParametricCurve& curve, const Vec3& p, double theta) {
  const double sigma = curve.eval_unchecked_order(theta, 1).norm();
  const double dist = (p - curve.eval_unchecked_order(theta, 0)).norm();
  return 1e-10 * sigma * std::max(1.0, dist);
}

}  // namespace

double closest_point(const ParametricCurve& curve, const Vec3& p,
                     double xi_guess) {
  const double lo = curve.theta_min(), hi = curve.theta_max();
  if (xi_guess < lo || xi_guess > hi)
    throw std::domain_error("closest_point: xi_guess outside curve domain");

  double theta = xi_guess;

  // The distance minimum has g crossing + -> -. Expand a bracket around the
  // guess; failing that, classify the boundary cases.
  double a = theta, b = theta;
  double step = std::max((hi - lo) / 256.0, 1e-12);
  bool bracketed = false;
  for (int it = 0; it < 64 && !bracketed; ++it) {
    a = std::max(lo, a - step);
    b = std::min(hi, b + step);
    step *= 2.0;
    if (g_value(curve, p, a) > 0.0 && g_value(curve, p, b) < 0.0)
      bracketed = true;
    if (a == lo && b == hi) break;
  }
  if (!bracketed) {
    const double ga = g_value(curve, p, lo);
    const double gb = g_value(curve, p, hi);
    if (ga > 0.0 && gb < 0.0) {
      a = lo;
      b = hi;
      bracketed = true;
    } else {
      // no sign change: accept a point that is already stationary (interior
      // guess or a stationary domain end), otherwise the projection clamps
      for (double cand : {theta, lo, hi}) {
        if (std::abs(g_value(curve, p, cand)) <=
            converged_tol(curve, p, cand)) {
          if (g_slope(curve, p, cand) >= 0.0)
            throw SaddlePointError(
                "closest_point: stationary point is not a minimum", cand);
          return cand;
        }
      }
      throw ProjectionError(
          "closest_point: no interior minimum bracket (closest point clamps "
          "to a domain end)");
    }
  }

  theta = std::clamp(theta, a, b);
  double g = g_value(curve, p, theta);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(g) <= converged_tol(curve, p, theta)) break;
    if (g > 0.0)
      a = theta;
    else
      b = theta;
    const double slope = g_slope(curve, p, theta);
    double next = (slope != 0.0) ? theta - g / slope : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    theta = next;
    g = g_value(curve, p, theta);
    if (b - a < 1e-15 * std::max(1.0, std::abs(theta))) break;
  }
  if (std::abs(g) > converged_tol(curve, p, theta))
    throw ProjectionError("closest_point: Newton/bisection failed to converge");
  if (g_slope(curve, p, theta) >= 0.0)
    throw SaddlePointError("closest_point: converged to a maximum/saddle",
                           theta);
  return theta;
}

double global_project(const ParametricCurve& curve, const Vec3& p) {
  const double lo = curve.theta_min(), hi = curve.theta_max();
  double best = lo, best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 256; ++i) {
    const double t = lo + (hi - lo) * double(i) / 256.0;
    const double d = (p - curve.eval_unchecked_order(t, 0)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  return closest_point(curve, p, best);
}

Projection project(const ParametricCurve& curve, const FrameField& frames,
                   const Vec3& p, double xi_guess) {
  const double xi = closest_point(curve, p, xi_guess);
  const FrameSample frame = frame_at(frames, xi);
  const Vec3 d = p - curve.eval_unchecked_order(xi, 0);
  Projection out;
  out.state.xi = xi;
  out.state.eta = Vec2(frame.e2().dot(d), frame.e3().dot(d));
  out.tangential_residual = frame.e1().dot(d);
  if (std::abs(out.tangential_residual) >= 1e-8)
    throw ProjectionError("project: tangential residual " +
                          std::to_string(out.tangential_residual) +
                          " exceeds 1e-8 (frame/projection mismatch)");
  return out;
}

Vec3 reconstruct(const ParametricCurve& curve, const FrameField& frames,
                 const SpatialState& s) {
  const FrameSample frame = frame_at(frames, s.xi);
  return curve.eval_unchecked_order(s.xi, 0) +
         frame.R * Vec3(0.0, s.eta.x(), s.eta.y());
}

SpatialRates spatial_rates(const FrameSample& frame, double sigma,
                           const SpatialState& s, const Vec3& v_world) {
  const Vec3& w = frame.omega_path;
  const double denom = sigma - w.z() * s.eta.x() + w.y() * s.eta.y();
  if (std::abs(denom) <= 1e-9 * sigma)
    throw TubeError("spatial_rates: point at the center-of-curvature locus");
  SpatialRates r;
  r.xi_dot = frame.e1().dot(v_world) / denom;
  r.eta1_dot = frame.e2().dot(v_world) + r.xi_dot * w.x() * s.eta.y();
  r.eta2_dot = frame.e3().dot(v_world) - r.xi_dot * w.x() * s.eta.x();
  return r;
}

SpatialRates spatial_rates_fsf(double kappa, double tau, const Mat3& basis,
                               const SpatialState& s, const Vec3& v_world) {
  const double denom = 1.0 - kappa * s.eta.x();
  if (std::abs(denom) <= 1e-9)
    throw TubeError("spatial_rates_fsf: denominator 1 - kappa*eta1 vanishes");
  SpatialRates r;
  r.xi_dot = basis.col(0).dot(v_world) / denom;
  r.eta1_dot = basis.col(1).dot(v_world) + r.xi_dot * tau * s.eta.y();
  r.eta2_dot = basis.col(2).dot(v_world) - r.xi_dot * tau * s.eta.x();
  return r;
}

PlanarRates spatial_rates_planar(double sigma, double omega3, const Vec3& e1,
                                 const Vec3& e2, double eta1,
                                 const Vec3& v_world) {
  const double denom = sigma - omega3 * eta1;
  if (std::abs(denom) <= 1e-9 * sigma)
    throw TubeError("spatial_rates_planar: denominator vanishes");
  PlanarRates r;
  r.xi_dot = e1.dot(v_world) / denom;
  r.eta1_dot = e2.dot(v_world);
  return r;
}

double xidot_optimality(const ParametricCurve& curve, const Vec3& p,
                        const Vec3& v_world, double xi) {
  const Vec3 u = curve.eval(xi, 1);
  const Vec3 d = p - curve.eval(xi, 0);
  const double sigma2 = u.squaredNorm();
  const double denom = sigma2 - d.dot(curve.eval(xi, 2));
  if (std::abs(denom) <= 1e-9 * sigma2)
    throw TubeError("xidot_optimality: denominator vanishes");
  return v_world.dot(u) / denom;
}

}  // namespace ppf
