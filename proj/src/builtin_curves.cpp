#include "ppf/builtin_curves.hpp"

#include <cmath>

namespace ppf {
namespace {

using Jet = std::array<double, 5>;  // scalar value + derivatives 1..4

Jet sin_jet(double w, double t) {
  const double s = std::sin(w * t), c = std::cos(w * t);
  return {s, w * c, -w * w * s, -w * w * w * c, w * w * w * w * s};
}

Jet cos_jet(double w, double t) {
  const double s = std::sin(w * t), c = std::cos(w * t);
  return {c, -w * s, -w * w * c, w * w * w * s, w * w * w * w * c};
}

Jet mul(const Jet& f, const Jet& g) {
  // Leibniz through order 4
  Jet out{};
  static const double binom[5][5] = {{1, 0, 0, 0, 0},
                                     {1, 1, 0, 0, 0},
                                     {1, 2, 1, 0, 0},
                                     {1, 3, 3, 1, 0},
                                     {1, 4, 6, 4, 1}};
  for (int n = 0; n <= 4; ++n)
    for (int k = 0; k <= n; ++k) out[n] += binom[n][k] * f[k] * g[n - k];
  return out;
}

Jet exp_jet(const Jet& u) {
  const double e = std::exp(u[0]);
  Jet out{};
  out[0] = e;
  out[1] = e * u[1];
  out[2] = e * (u[2] + u[1] * u[1]);
  out[3] = e * (u[3] + 3 * u[1] * u[2] + u[1] * u[1] * u[1]);
  out[4] = e * (u[4] + 4 * u[1] * u[3] + 3 * u[2] * u[2] +
                6 * u[1] * u[1] * u[2] + u[1] * u[1] * u[1] * u[1]);
  return out;
}

Jet constant(double v) { return {v, 0, 0, 0, 0}; }

Jet identity(double t) { return {t, 1, 0, 0, 0}; }

std::array<Vec3, 5> pack(const Jet& x, const Jet& y, const Jet& z) {
  std::array<Vec3, 5> out;
  for (int k = 0; k <= 4; ++k) out[k] = Vec3(x[k], y[k], z[k]);
  return out;
}

}  // namespace

AnalyticCurve analytic_curve(const std::string& name) {
  AnalyticCurve ac;
  if (name == "line") {
    ac.dimension = 3;
    ac.theta0 = 0.0;
    ac.theta1 = 1.0;
    ac.jets = [](double t) {
      return pack(identity(t), constant(0.0), constant(0.0));
    };
  } else if (name == "line2d") {
    ac.dimension = 2;
    ac.theta0 = 0.0;
    ac.theta1 = 1.0;
    ac.jets = [](double t) {
      return pack(identity(t), constant(0.0), constant(0.0));
    };
  } else if (name == "sin2d") {
    ac.dimension = 2;
    ac.theta0 = 0.0;
    ac.theta1 = 1.0;
    ac.jets = [](double t) {
      return pack(identity(t), sin_jet(2.0 * M_PI, t), constant(0.0));
    };
  } else if (name == "coil3d") {
    ac.dimension = 3;
    ac.theta0 = 0.0;
    ac.theta1 = 2.0 * M_PI;
    ac.jets = [](double t) {
      Jet r = cos_jet(1.0, t);
      for (int k = 0; k <= 4; ++k) r[k] *= 0.3;
      r[0] += 0.6;
      Jet z = sin_jet(7.0, t);
      for (int k = 0; k <= 4; ++k) z[k] *= 0.3;
      return pack(mul(r, cos_jet(2.0, t)), mul(r, sin_jet(2.0, t)), z);
    };
  } else if (name == "sinref") {
    ac.dimension = 2;
    ac.theta0 = 0.0;
    ac.theta1 = 1.0;
    ac.jets = [](double t) {
      Jet y = sin_jet(2.0 * M_PI, t);
      for (int k = 0; k <= 4; ++k) y[k] *= 0.5;
      y[0] += 1.0;
      return pack(identity(t), y, constant(0.0));
    };
  } else if (name == "contcurve") {
    ac.dimension = 2;
    // gamma'(0) = 0 for this curve, so the domain starts clear of the
    // parametric singularity; the split point of interest is theta = 0.5.
    ac.theta0 = 0.04;
    ac.theta1 = 0.96;
    ac.jets = [](double t) {
      Jet x = cos_jet(9.0, t);
      for (int k = 0; k <= 4; ++k) x[k] *= 0.5;
      return pack(x, exp_jet(cos_jet(1.8, t)), constant(0.0));
    };
  } else if (name == "circle") {
    ac.dimension = 2;
    ac.theta0 = 0.0;
    ac.theta1 = 2.0 * M_PI;
    ac.jets = [](double t) {
      return pack(cos_jet(1.0, t), sin_jet(1.0, t), constant(0.0));
    };
  } else if (name == "helix") {
    ac.dimension = 3;
    ac.theta0 = 0.0;
    ac.theta1 = 2.0 * M_PI;
    ac.jets = [](double t) {
      return pack(cos_jet(1.0, t), sin_jet(1.0, t), identity(t));
    };
  } else {
    throw std::invalid_argument("analytic_curve: unknown curve '" + name + "'");
  }
  return ac;
}

ParametricCurve to_parametric(const AnalyticCurve& ac, int n_nodes,
                              int continuity) {
  if (n_nodes < 2) throw std::invalid_argument("to_parametric: n_nodes < 2");
  std::vector<double> th(n_nodes);
  std::vector<Vec3> values(n_nodes);
  std::vector<std::vector<Vec3>> derivs(continuity,
                                        std::vector<Vec3>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    th[i] = ac.theta0 + (ac.theta1 - ac.theta0) * double(i) / (n_nodes - 1);
    if (i == n_nodes - 1) th[i] = ac.theta1;
    auto jet = ac.jets(th[i]);
    values[i] = jet[0];
    for (int m = 1; m <= continuity; ++m) derivs[m - 1][i] = jet[m];
  }
  return hermite_curve(ac.dimension, th, values, derivs, continuity);
}

ParametricCurve builtin_curve(const std::string& name) {
  const AnalyticCurve ac = analytic_curve(name);
  // Node spacing trades Hermite truncation (grows with the curve's angular
  // frequency) against roundoff in the high-derivative evaluations (grows
  // as 1/h^3), so smoother curves get fewer, wider segments.
  int nodes = 200;
  if (name == "line" || name == "line2d") nodes = 2;
  if (name == "coil3d") nodes = 400;
  if (name == "circle" || name == "helix") nodes = 100;
  return to_parametric(ac, nodes, 4);
}

}  // namespace ppf
