#pragma once

#include <memory>
#include <vector>

#include "ppf/curve.hpp"
#include "ppf/types.hpp"

namespace ppf {

/// Raised where the Frenet-Serret frame is undefined (curvature vanishes).
struct FsfSingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an exponential step would exceed a half turn.
struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a curve lacks the continuity a derivative order requires.
struct ContinuityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FrameKind { Fsf, Ptf };

/// Adapted frame at one parameter value. R columns are (e1, e2, e3) with
/// e1 the unit tangent. omega_path is the angular rate per unit theta in
/// the path frame; omega/alpha/jerk_world and the frame derivatives are
/// filled by enrichment (ptfd, fsf_frame) and zero otherwise.
struct FrameSample {
  double theta = 0.0;
  Mat3 R = Mat3::Identity();
  Vec3 omega_path = Vec3::Zero();
  Vec3 omega_world = Vec3::Zero();
  Vec3 alpha_world = Vec3::Zero();
  Vec3 jerk_world = Vec3::Zero();
  Mat3 R_prime = Mat3::Zero();
  Mat3 R_dprime = Mat3::Zero();
  bool enriched = false;

  Vec3 e1() const { return R.col(0); }
  Vec3 e2() const { return R.col(1); }
  Vec3 e3() const { return R.col(2); }
};

/// Frames sampled on a strictly increasing grid inside the curve domain.
struct FrameField {
  FrameKind kind = FrameKind::Ptf;
  std::shared_ptr<const ParametricCurve> curve;
  std::vector<double> grid;
  std::vector<FrameSample> samples;
  double max_adaptation_drift = 0.0;  // tangent correction applied per step
};

/// Omega such that skew(w) v = w x v; exactly antisymmetric.
Mat3 skew(const Vec3& w);

/// Rodrigues closed form for exp(skew(w)); 2nd-order series below 1e-8.
Mat3 so3_exp(const Vec3& w);

/// [0, -e1'.e3, e1'.e2] expressed in the path frame; the first component is
/// identically zero (twist-free).
Vec3 ptf_angular_velocity(const Vec3& e1_prime, const Mat3& R);

/// R_next = exp(skew(omega_world) * dtheta) * R. Throws StepSizeError when
/// |omega| * |dtheta| >= pi.
Mat3 so3_exp_step(const Mat3& R, const Vec3& omega_world, double dtheta);

/// Deterministic adapted frame at theta_min. 2D curves get the in-plane
/// left normal (e2 = z x e1, e3 = z); 3D curves project the world axis
/// least aligned with e1 (ties broken by axis index).
Mat3 initial_frame(const ParametricCurve& curve);

/// Replaces the first column with the given unit tangent and re-orthogonalizes
/// the normal plane with one Gram-Schmidt pass.
Mat3 adapt_frame(const Mat3& R, const Vec3& tangent);

/// sigma and unit tangent with exact derivatives to third order.
struct TangentJet {
  double sigma = 0.0, sigma_p = 0.0, sigma_pp = 0.0, sigma_ppp = 0.0;
  Vec3 e1 = Vec3::Zero(), e1_p = Vec3::Zero(), e1_pp = Vec3::Zero(),
       e1_ppp = Vec3::Zero();
};
TangentJet tangent_jet(const ParametricCurve& curve, double theta,
                       bool left_limit = false);

/// Frenet-Serret frame with analytic angular velocity sigma*[tau, 0, kappa]
/// and exact frame derivatives. Also reports curvature and torsion.
struct FsfSample {
  FrameSample frame;
  double kappa = 0.0;
  double tau = 0.0;
};
FsfSample fsf_frame(const ParametricCurve& curve, double theta,
                    bool left_limit = false);

/// Parallel transport frame integration: angular velocity at each node and
/// one exponential step per interval, re-adapting e1 to the exact tangent.
/// R0 must be adapted at grid[0] to 1e-9.
FrameField ptfi(std::shared_ptr<const ParametricCurve> curve,
                std::vector<double> grid, const Mat3& R0);

/// Convenience: uniform grid of n_steps+1 nodes over the curve domain with
/// R0 = initial_frame.
FrameField ptfi_uniform(std::shared_ptr<const ParametricCurve> curve,
                        int n_steps);

struct PtfdOptions {
  // The derivative chain needs a C3 curve for alpha and C4 for jerk. The
  // continuity experiment disables the check to measure the very jumps a
  // deficient curve produces.
  bool require_continuity = true;
};

/// Per-node first/second frame derivatives, angular acceleration and jerk.
FrameField ptfd(const FrameField& field, const PtfdOptions& opts = {});

/// Enrichment of a single PTF sample from local curve derivatives;
/// left_limit selects the segment left of theta at interior knots.
FrameSample ptf_enrich(const ParametricCurve& curve, double theta,
                       const Mat3& R, bool left_limit = false);

/// Frame between grid nodes: one exponential step from the nearest lower
/// node, re-adapted and re-enriched at theta. Exact at grid nodes.
FrameSample frame_at(const FrameField& field, double theta);

}  // namespace ppf
