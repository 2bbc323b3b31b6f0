#include "ppf/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace ppf {
namespace {

double falling(int k, int m) {
  double f = 1.0;
  for (int i = 0; i < m; ++i) f *= double(k - i);
  return f;
}

// 15-point Gauss-Legendre nodes/weights on [-1,1], computed once by Newton
// iteration on the Legendre recurrence.
struct Gl15 {
  double x[15];
  double w[15];
  Gl15() {
    const int n = 15;
    for (int i = 0; i < n; ++i) {
      double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        double step = p1 / dp;
        xi -= step;
        if (std::abs(step) < 1e-15) break;
      }
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      x[i] = xi;
      w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
  }
};

const Gl15& gl15() {
  static const Gl15 table;
  return table;
}

template <typename F>
double gl15_integrate(const F& f, double a, double b) {
  const Gl15& g = gl15();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 15; ++i) acc += g.w[i] * f(mid + half * g.x[i]);
  return acc * half;
}

template <typename F>
double adaptive_gl15(const F& f, double a, double b, double whole, double tol,
                     int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl15_integrate(f, a, m);
  const double right = gl15_integrate(f, m, b);
  const double err = std::abs(left + right - whole);
  if (err <= tol || depth >= 40) return left + right;
  return adaptive_gl15(f, a, m, left, 0.5 * tol, depth + 1) +
         adaptive_gl15(f, m, b, right, 0.5 * tol, depth + 1);
}

}  // namespace

void WaypointSet::validate() const {
  if (dimension != 2 && dimension != 3)
    throw std::invalid_argument("WaypointSet: dimension must be 2 or 3");
  if (points.size() < 2)
    throw std::invalid_argument("WaypointSet: at least 2 points required");
  for (size_t i = 1; i < points.size(); ++i) {
    if ((points[i] - points[i - 1]).norm() == 0.0)
      throw std::invalid_argument(
          "WaypointSet: identical consecutive points at index " +
          std::to_string(i));
  }
  if (!params.empty()) {
    if (params.size() != points.size())
      throw std::invalid_argument("WaypointSet: params size mismatch");
    for (size_t i = 1; i < params.size(); ++i)
      if (params[i] <= params[i - 1])
        throw std::invalid_argument("WaypointSet: params must increase");
  }
}

ParametricCurve::ParametricCurve(int dimension, std::vector<double> knots,
                                 std::vector<Eigen::MatrixXd> segment_coeffs,
                                 int continuity_class)
    : dimension_(dimension),
      continuity_(continuity_class),
      knots_(std::move(knots)),
      coeffs_(std::move(segment_coeffs)) {
  if (dimension_ != 2 && dimension_ != 3)
    throw std::invalid_argument("ParametricCurve: dimension must be 2 or 3");
  if (knots_.size() < 2)
    throw std::invalid_argument("ParametricCurve: need at least 2 knots");
  if (coeffs_.size() + 1 != knots_.size())
    throw std::invalid_argument("ParametricCurve: segment/knot count mismatch");
  if (continuity_ < 0)
    throw std::invalid_argument("ParametricCurve: negative continuity class");
  for (size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1]))
      throw std::invalid_argument("ParametricCurve: knots must increase");
  for (const auto& c : coeffs_)
    if (c.rows() != dimension_ || c.cols() < 1)
      throw std::invalid_argument("ParametricCurve: bad coefficient block");
}

int ParametricCurve::segment_index(double theta) const {
  // Right-continuous: [k_i, k_{i+1}) -> i; theta_max -> last segment.
  auto it = std::upper_bound(knots_.begin(), knots_.end(), theta);
  int idx = int(it - knots_.begin()) - 1;
  return std::clamp(idx, 0, int(coeffs_.size()) - 1);
}

Vec3 ParametricCurve::eval(double theta, int order) const {
  if (theta < theta_min() || theta > theta_max())
    throw std::domain_error("curve eval: theta " + std::to_string(theta) +
                            " outside [" + std::to_string(theta_min()) + ", " +
                            std::to_string(theta_max()) + "]");
  if (order < 0 || order > 4)
    throw std::invalid_argument("curve eval: order must be 0..4");
  return eval_unchecked_order(theta, order);
}

Vec3 ParametricCurve::eval_unchecked_order(double theta, int order) const {
  const int i = segment_index(theta);
  const double h = knots_[i + 1] - knots_[i];
  const double s = (theta - knots_[i]) / h;
  const Eigen::MatrixXd& a = coeffs_[i];
  const int deg = int(a.cols()) - 1;

  Vec3 out = Vec3::Zero();
  if (order > deg) return out;
  for (int d = 0; d < dimension_; ++d) {
    double acc = 0.0;
    for (int k = deg; k >= order; --k) acc = acc * s + a(d, k) * falling(k, order);
    out[d] = acc;
  }
  return out * std::pow(h, -double(order));
}

Vec3 ParametricCurve::eval_one_sided(double theta, int order, bool left) const {
  if (theta < theta_min() || theta > theta_max())
    throw std::domain_error("curve eval_one_sided: theta outside domain");
  int i = segment_index(theta);
  if (left) {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), theta);
    if (it != knots_.end() && *it == theta && it != knots_.begin())
      i = std::max(0, int(it - knots_.begin()) - 1);
  }
  const double h = knots_[i + 1] - knots_[i];
  const double s = (theta - knots_[i]) / h;
  const Eigen::MatrixXd& a = coeffs_[i];
  const int deg = int(a.cols()) - 1;
  Vec3 out = Vec3::Zero();
  if (order > deg) return out;
  for (int d = 0; d < dimension_; ++d) {
    double acc = 0.0;
    for (int k = deg; k >= order; --k) acc = acc * s + a(d, k) * falling(k, order);
    out[d] = acc;
  }
  return out * std::pow(h, -double(order));
}

double ParametricCurve::parametric_speed(double theta) const {
  const double sigma = eval(theta, 1).norm();
  if (sigma < 1e-12)
    throw std::runtime_error(
        "parametric_speed: degenerate parameterization, sigma < 1e-12 at theta " +
        std::to_string(theta));
  return sigma;
}

double ParametricCurve::arc_length(double theta) const {
  if (theta < theta_min() || theta > theta_max())
    throw std::domain_error("arc_length: theta outside domain");
  const double span = theta_max() - theta_min();
  auto speed = [this](double t) { return eval_unchecked_order(t, 1).norm(); };
  double total = 0.0;
  for (size_t i = 0; i + 1 < knots_.size() && knots_[i] < theta; ++i) {
    const double a = knots_[i];
    const double b = std::min(knots_[i + 1], theta);
    if (b <= a) continue;
    const double tol = 1e-10 * std::max(1e-3, (b - a) / span);
    total += adaptive_gl15(speed, a, b, gl15_integrate(speed, a, b), tol, 0);
  }
  return total;
}

double ParametricCurve::max_knot_defect() const {
  double worst = 0.0;
  for (size_t i = 1; i + 1 < knots_.size(); ++i) {
    for (int m = 0; m <= continuity_; ++m) {
      const Vec3 l = eval_one_sided(knots_[i], m, true);
      const Vec3 r = eval_one_sided(knots_[i], m, false);
      const double scale = std::max({1.0, l.norm(), r.norm()});
      worst = std::max(worst, (l - r).norm() / scale);
    }
  }
  return worst;
}

void ParametricCurve::validate() const {
  const double defect = max_knot_defect();
  if (defect >= 1e-9)
    throw std::runtime_error("curve validate: knot continuity defect " +
                             std::to_string(defect) + " exceeds 1e-9");
  const int samples = 64 * int(coeffs_.size());
  for (int i = 0; i <= samples; ++i) {
    const double t =
        theta_min() + (theta_max() - theta_min()) * double(i) / samples;
    if (eval_unchecked_order(t, 1).norm() < 1e-12)
      throw std::runtime_error("curve validate: vanishing parametric speed");
  }
}

namespace {

// Degree 2c+1 Hermite segment over local s in [0,1]: values and derivatives
// 1..c (theta units) at both ends. Returns dim x (2c+2) coefficients.
Eigen::MatrixXd hermite_segment(double h, int dim, const Vec3& p0, const Vec3& p1,
                                const std::vector<Vec3>& d0,
                                const std::vector<Vec3>& d1, int c) {
  const int deg = 2 * c + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, deg + 1);
  // Left-end conditions fix a_0..a_c directly.
  for (int d = 0; d < dim; ++d) a(d, 0) = p0[d];
  double hm = 1.0;
  for (int m = 1; m <= c; ++m) {
    hm *= h;
    double mf = 1.0;
    for (int i = 2; i <= m; ++i) mf *= i;
    for (int d = 0; d < dim; ++d) a(d, m) = d0[m - 1][d] * hm / mf;
  }
  // Right-end conditions determine a_{c+1}..a_{2c+1}.
  Eigen::MatrixXd M(c + 1, c + 1);
  for (int m = 0; m <= c; ++m)
    for (int j = 0; j <= c; ++j) M(m, j) = falling(c + 1 + j, m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::MatrixXd rhs(c + 1, dim);
  for (int d = 0; d < dim; ++d) {
    for (int m = 0; m <= c; ++m) {
      double target = (m == 0) ? p1[d] : d1[m - 1][d] * std::pow(h, m);
      double low = 0.0;
      for (int k = m; k <= c; ++k) low += a(d, k) * falling(k, m);
      rhs(m, d) = target - low;
    }
  }
  Eigen::MatrixXd sol = lu.solve(rhs);
  for (int d = 0; d < dim; ++d)
    for (int j = 0; j <= c; ++j) a(d, c + 1 + j) = sol(j, d);
  return a;
}

}  // namespace

std::vector<Vec3> estimate_derivatives(const std::vector<double>& th,
                                       const std::vector<Vec3>& pts, int i,
                                       int c, int dim) {
  const int n = int(pts.size());
  const int window = std::min(n, 2 * c + 2);
  int lo = std::clamp(i - (window - 1) / 2, 0, n - window);
  double w = 0.0;
  for (int j = lo; j < lo + window; ++j) w = std::max(w, std::abs(th[j] - th[i]));
  if (w == 0.0) w = 1.0;

  Eigen::MatrixXd V(window, window);
  Eigen::MatrixXd P(window, dim);
  for (int j = 0; j < window; ++j) {
    const double t = (th[lo + j] - th[i]) / w;
    double p = 1.0;
    for (int k = 0; k < window; ++k) {
      V(j, k) = p;
      p *= t;
    }
    for (int d = 0; d < dim; ++d) P(j, d) = pts[lo + j][d];
  }
  Eigen::MatrixXd coef = V.fullPivLu().solve(P);

  std::vector<Vec3> out(c, Vec3::Zero());
  double mf = 1.0;
  for (int m = 1; m <= c; ++m) {
    mf *= m;
    if (m >= window) break;
    for (int d = 0; d < dim; ++d) out[m - 1][d] = coef(m, d) * mf / std::pow(w, m);
  }
  return out;
}

ParametricCurve interpolate(const WaypointSet& wps, int continuity,
                            const ClampedEnds& clamp) {
  wps.validate();
  if (continuity < 0 || continuity > 4)
    throw std::invalid_argument("interpolate: continuity must be 0..4");
  const int n = int(wps.points.size());
  const bool clamped = !clamp.start.empty() || !clamp.end.empty();
  if (n < continuity + 1 && !clamped)
    throw std::invalid_argument(
        "interpolate: not enough waypoints for requested smoothness");
  if (!clamp.start.empty() && int(clamp.start.size()) != continuity)
    throw std::invalid_argument("interpolate: clamp.start needs orders 1..c");
  if (!clamp.end.empty() && int(clamp.end.size()) != continuity)
    throw std::invalid_argument("interpolate: clamp.end needs orders 1..c");

  std::vector<double> th = wps.params;
  if (th.empty()) {
    th.resize(n);
    th[0] = 0.0;
    for (int i = 1; i < n; ++i)
      th[i] = th[i - 1] + (wps.points[i] - wps.points[i - 1]).norm();
    const double total = th.back();
    for (int i = 0; i < n; ++i) th[i] /= total;
    th.back() = 1.0;
  }

  std::vector<std::vector<Vec3>> derivs(n);
  for (int i = 0; i < n; ++i)
    derivs[i] = estimate_derivatives(th, wps.points, i, continuity, wps.dimension);
  if (!clamp.start.empty()) derivs.front() = clamp.start;
  if (!clamp.end.empty()) derivs.back() = clamp.end;

  std::vector<Eigen::MatrixXd> segs;
  segs.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i)
    segs.push_back(hermite_segment(th[i + 1] - th[i], wps.dimension,
                                   wps.points[i], wps.points[i + 1], derivs[i],
                                   derivs[i + 1], continuity));
  return ParametricCurve(wps.dimension, th, std::move(segs), continuity);
}

ParametricCurve hermite_curve(int dimension, const std::vector<double>& thetas,
                              const std::vector<Vec3>& values,
                              const std::vector<std::vector<Vec3>>& derivs,
                              int continuity) {
  const int n = int(thetas.size());
  if (n < 2 || values.size() != size_t(n))
    throw std::invalid_argument("hermite_curve: bad node data");
  if (int(derivs.size()) != continuity)
    throw std::invalid_argument("hermite_curve: need derivative orders 1..c");
  for (const auto& order : derivs)
    if (order.size() != size_t(n))
      throw std::invalid_argument("hermite_curve: derivative size mismatch");

  auto node_derivs = [&](int i) {
    std::vector<Vec3> d(continuity);
    for (int m = 0; m < continuity; ++m) d[m] = derivs[m][i];
    return d;
  };
  std::vector<Eigen::MatrixXd> segs;
  segs.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i)
    segs.push_back(hermite_segment(thetas[i + 1] - thetas[i], dimension,
                                   values[i], values[i + 1], node_derivs(i),
                                   node_derivs(i + 1), continuity));
  return ParametricCurve(dimension, thetas, std::move(segs), continuity);
}

ParametricCurve concat(const ParametricCurve& a, const ParametricCurve& b,
                       int continuity) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("concat: dimension mismatch");
  if (std::abs(a.theta_max() - b.theta_min()) > 1e-12)
    throw std::invalid_argument("concat: curves must share an endpoint knot");
  std::vector<double> knots = a.knots();
  knots.insert(knots.end(), b.knots().begin() + 1, b.knots().end());
  std::vector<Eigen::MatrixXd> segs = a.segments();
  segs.insert(segs.end(), b.segments().begin(), b.segments().end());
  return ParametricCurve(a.dimension(), std::move(knots), std::move(segs),
                         continuity);
}

nlohmann::json curve_to_json(const ParametricCurve& c) {
  nlohmann::json j;
  j["dimension"] = c.dimension();
  j["continuity"] = c.continuity_class();
  j["basis"] = "power";
  j["knots"] = c.knots();
  auto segs = nlohmann::json::array();
  for (const auto& m : c.segments()) {
    std::vector<double> flat(m.size());
    // row-major: dimension-0 coefficients first
    for (int d = 0; d < m.rows(); ++d)
      for (int k = 0; k < m.cols(); ++k) flat[d * m.cols() + k] = m(d, k);
    nlohmann::json seg;
    seg["coeffs"] = flat;
    segs.push_back(seg);
  }
  j["segments"] = segs;
  return j;
}

ParametricCurve curve_from_json(const nlohmann::json& j) {
  const int dim = j.at("dimension").get<int>();
  const int cont = j.at("continuity").get<int>();
  if (j.at("basis").get<std::string>() != "power")
    throw std::invalid_argument("curve_from_json: unsupported basis");
  std::vector<double> knots = j.at("knots").get<std::vector<double>>();
  std::vector<Eigen::MatrixXd> segs;
  for (const auto& seg : j.at("segments")) {
    std::vector<double> flat = seg.at("coeffs").get<std::vector<double>>();
    if (flat.size() % dim != 0)
      throw std::invalid_argument("curve_from_json: ragged coefficients");
    const int cols = int(flat.size()) / dim;
    Eigen::MatrixXd m(dim, cols);
    for (int d = 0; d < dim; ++d)
      for (int k = 0; k < cols; ++k) m(d, k) = flat[d * cols + k];
    segs.push_back(std::move(m));
  }
  return ParametricCurve(dim, std::move(knots), std::move(segs), cont);
}

WaypointSet waypoints_from_csv(const std::string& text, bool with_params) {
  WaypointSet wps;
  wps.dimension = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    size_t off = 0;
    if (with_params) {
      wps.params.push_back(vals[0]);
      off = 1;
    }
    const int dim = int(vals.size() - off);
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("waypoints_from_csv: rows must have 2 or 3 coordinates");
    if (wps.dimension == 0) wps.dimension = dim;
    if (wps.dimension != dim)
      throw std::invalid_argument("waypoints_from_csv: inconsistent row widths");
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < dim; ++d) p[d] = vals[off + d];
    wps.points.push_back(p);
  }
  wps.validate();
  return wps;
}

}  // namespace ppf
