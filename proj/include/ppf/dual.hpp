#pragma once

#include <cmath>

#include <Eigen/Core>

namespace ppf {

/// Forward-mode scalar with a fixed-width gradient. Wide enough for one
/// transcription stage (two state blocks + one input block).
template <int N>
struct Dual {
  double v = 0.0;
  Eigen::Matrix<double, N, 1> g = Eigen::Matrix<double, N, 1>::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}
  static Dual seed(double value, int k) {
    Dual d(value);
    d.g[k] = 1.0;
    return d;
  }

  Dual operator-() const {
    Dual r;
    r.v = -v;
    r.g = -g;
    return r;
  }
  Dual& operator+=(const Dual& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    g -= o.g;
    return *this;
  }
};

template <int N>
Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  return r;
}
template <int N>
Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  return r;
}
template <int N>
Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  return r;
}
template <int N>
Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r;
  r.v = a.v / b.v;
  r.g = (a.g - r.v * b.g) / b.v;
  return r;
}
template <int N>
Dual<N> operator*(double s, const Dual<N>& a) {
  Dual<N> r;
  r.v = s * a.v;
  r.g = s * a.g;
  return r;
}
template <int N>
Dual<N> operator*(const Dual<N>& a, double s) {
  return s * a;
}
template <int N>
Dual<N> operator+(const Dual<N>& a, double s) {
  Dual<N> r = a;
  r.v += s;
  return r;
}
template <int N>
Dual<N> operator+(double s, const Dual<N>& a) {
  return a + s;
}
template <int N>
Dual<N> operator-(const Dual<N>& a, double s) {
  Dual<N> r = a;
  r.v -= s;
  return r;
}
template <int N>
Dual<N> operator-(double s, const Dual<N>& a) {
  return -(a - s);
}
template <int N>
Dual<N> operator/(const Dual<N>& a, double s) {
  Dual<N> r;
  r.v = a.v / s;
  r.g = a.g / s;
  return r;
}
template <int N>
Dual<N> operator/(double s, const Dual<N>& a) {
  Dual<N> r;
  r.v = s / a.v;
  r.g = (-r.v / a.v) * a.g;
  return r;
}

template <int N>
Dual<N> sin(const Dual<N>& a) {
  Dual<N> r;
  r.v = std::sin(a.v);
  r.g = std::cos(a.v) * a.g;
  return r;
}
template <int N>
Dual<N> cos(const Dual<N>& a) {
  Dual<N> r;
  r.v = std::cos(a.v);
  r.g = -std::sin(a.v) * a.g;
  return r;
}

// value/gradient accessors shared with plain doubles so the dynamics can be
// written once and instantiated for both scalar types
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Dual<N>& x) {
  return x.v;
}

inline double sin_of(double x) { return std::sin(x); }
inline double cos_of(double x) { return std::cos(x); }
template <int N>
Dual<N> sin_of(const Dual<N>& x) {
  return sin(x);
}
template <int N>
Dual<N> cos_of(const Dual<N>& x) {
  return cos(x);
}

}  // namespace ppf
