#pragma once

#include <vector>

#include <Eigen/Core>

namespace ppf {

/// First-kind Chebyshev basis T_0..T_n at t in [-1,1].
inline Eigen::VectorXd chebyshev_basis(int degree, double t) {
  Eigen::VectorXd T(degree + 1);
  T[0] = 1.0;
  if (degree >= 1) T[1] = t;
  for (int k = 2; k <= degree; ++k) T[k] = 2.0 * t * T[k - 1] - T[k - 2];
  return T;
}

/// Clenshaw recurrence for sum_k coeffs[k] T_k(t).
inline double chebyshev_eval(const Eigen::VectorXd& coeffs, double t) {
  const int n = int(coeffs.size()) - 1;
  if (n < 0) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = n; k >= 1; --k) {
    const double b0 = coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + t * b1 - b2;
}

/// d/dt of the series, via T_k' = k U_{k-1} and Clenshaw on U.
inline double chebyshev_eval_derivative(const Eigen::VectorXd& coeffs, double t) {
  const int n = int(coeffs.size()) - 1;
  if (n < 1) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = n; k >= 2; --k) {
    const double b0 = double(k) * coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[1] + 2.0 * t * b1 - b2;
}

}  // namespace ppf
