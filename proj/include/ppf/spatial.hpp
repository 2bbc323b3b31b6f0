#pragma once

#include "ppf/curve.hpp"
#include "ppf/frames.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Raised when the rate denominator approaches zero: the point sits at (or
/// beyond) the local center of curvature and the projection breaks down.
struct TubeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the projection solver cannot isolate a stationary point.
struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the stationary point is a maximum/saddle; callers re-seed.
struct SaddlePointError : std::runtime_error {
  SaddlePointError(const std::string& what, double xi)
      : std::runtime_error(what), xi(xi) {}
  double xi;
};

/// Progress + transverse coordinates of a point relative to a framed path.
struct SpatialState {
  double xi = 0.0;
  Vec2 eta = Vec2::Zero();
};

struct SpatialRates {
  double xi_dot = 0.0;
  double eta1_dot = 0.0;
  double eta2_dot = 0.0;
};

struct Projection {
  SpatialState state;
  double tangential_residual = 0.0;  // e1 . (p - gamma(xi)), checked < 1e-8
};

/// Local closest-point parameter: safeguarded Newton on
/// g(theta) = (p - gamma)' gamma' from xi_guess, bisection fallback inside a
/// sign-change bracket. Converges to |g| < 1e-10 * sigma * max(1, |p-gamma|)
/// and verifies the second-order condition sigma^2 - d.gamma'' > 0.
double closest_point(const ParametricCurve& curve, const Vec3& p,
                     double xi_guess);

/// Seeds closest_point from a 256-sample grid argmin.
double global_project(const ParametricCurve& curve, const Vec3& p);

/// Spatial coordinates of p. Frames are evaluated through frame_at.
Projection project(const ParametricCurve& curve, const FrameField& frames,
                   const Vec3& p, double xi_guess);

/// p = gamma(xi) + R(xi) [0, eta1, eta2].
Vec3 reconstruct(const ParametricCurve& curve, const FrameField& frames,
                 const SpatialState& s);

/// Universal rates for a point at spatial state s moving at v (world frame):
///   xi_dot   = e1.v / (sigma - w3 eta1 + w2 eta2)
///   eta1_dot = e2.v + xi_dot w1 eta2
///   eta2_dot = e3.v - xi_dot w1 eta1
/// Throws TubeError when |denominator| <= 1e-9 * sigma.
SpatialRates spatial_rates(const FrameSample& frame, double sigma,
                           const SpatialState& s, const Vec3& v_world);

/// Frenet-Serret specialization, arc-length parameterization (sigma = 1):
/// denominator 1 - kappa eta1, twist tau in the transverse coupling.
SpatialRates spatial_rates_fsf(double kappa, double tau, const Mat3& basis,
                               const SpatialState& s, const Vec3& v_world);

/// Planar case: xi_dot = e1.v / (sigma - w3 eta1), eta1_dot = e2.v.
struct PlanarRates {
  double xi_dot = 0.0;
  double eta1_dot = 0.0;
};
PlanarRates spatial_rates_planar(double sigma, double omega3, const Vec3& e1,
                                 const Vec3& e2, double eta1,
                                 const Vec3& v_world);

/// Progress rate from curve derivatives alone (first-order optimality of
/// the closest-point problem): v.gamma' / (sigma^2 - d.gamma'').
double xidot_optimality(const ParametricCurve& curve, const Vec3& p,
                        const Vec3& v_world, double xi);

}  // namespace ppf
