#include "geotrend/sphere.hpp"

#include <cmath>
#include <numbers>

namespace geotrend {

namespace {

// Below this angle the slerp weights are evaluated through exp/log.
constexpr double kSmallAngle = 1e-6;

double sinc(double a) {
  if (std::abs(a) < 1e-4) return 1.0 - a * a / 6.0;
  return std::sin(a) / a;
}

}  // namespace

void require_unit(const Vec& x, const char* what, double tol) {
  if (!x.allFinite() || std::abs(x.norm() - 1.0) > tol) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + ": argument is not unit-norm");
  }
}

double sphere_distance(const Vec& x, const Vec& y) {
  require_unit(x, "sphere_distance");
  require_unit(y, "sphere_distance");
  // Half-angle form: exact for x == y, symmetric, and accurate near 0 and pi.
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

Vec sphere_log(const Vec& x, const Vec& y) {
  require_unit(x, "sphere_log");
  require_unit(y, "sphere_log");
  if (x == y) return Vec::Zero(x.size());
  const double c = x.dot(y);
  Vec w = y - c * x;
  const double s = w.norm();
  if (c < 0.0 && s < 1e-12) {
    throw Error(ErrorKind::Domain, "sphere_log: antipodal points");
  }
  if (s == 0.0) return Vec::Zero(x.size());
  const double phi = std::atan2(s, c);
  return (phi / s) * w;
}

Vec sphere_exp(const Vec& x, const Vec& v) {
  const double phi = v.norm();
  if (phi == 0.0) return x;
  Vec r = std::cos(phi) * x + sinc(phi) * v;
  return r / r.norm();
}

Vec slerp(const Vec& x, const Vec& y, double t) {
  require_unit(x, "slerp");
  require_unit(y, "slerp");
  if (x == y) return x;
  const double c = x.dot(y);
  const Vec w = y - c * x;
  const double s = w.norm();
  if (c < 0.0 && s < 1e-12) {
    throw Error(ErrorKind::Domain, "slerp: antipodal endpoints");
  }
  if (s == 0.0) return x;
  const double phi = std::atan2(s, c);
  if (phi < kSmallAngle) return sphere_exp(x, (t * phi / s) * w);
  const double sp = std::sin(phi);
  Vec r = (std::sin((1.0 - t) * phi) / sp) * x + (std::sin(t * phi) / sp) * y;
  return r / r.norm();
}

Vec sphere_parallel_transport(const Vec& x, const Vec& y, const Vec& v) {
  const double c = x.dot(y);
  if (c <= -1.0 + 1e-12) {
    throw Error(ErrorKind::Domain, "sphere_parallel_transport: antipodal");
  }
  return v - (y.dot(v) / (1.0 + c)) * (x + y);
}

Vec sphere_project_tangent(const Vec& x, const Vec& w) {
  return w - x.dot(w) * x;
}

Sphere::Sphere(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "sphere: dim < 1");
}

double Sphere::injectivity_radius() const { return std::numbers::pi; }

double Sphere::distance(const Vec& x, const Vec& y) const {
  return sphere_distance(x, y);
}

Vec Sphere::exp(const Vec& x, const Vec& v) const { return sphere_exp(x, v); }

Vec Sphere::log(const Vec& x, const Vec& y) const { return sphere_log(x, y); }

Vec Sphere::geodesic(const Vec& x, const Vec& y, double t) const {
  return slerp(x, y, t);
}

void Sphere::sample_geodesic(const Vec& x, const Vec& y,
                             std::span<const double> ts,
                             std::vector<Vec>& out) const {
  out.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = slerp(x, y, ts[i]);
}

Vec Sphere::transport(const Vec& x, const Vec& y, const Vec& v) const {
  return sphere_parallel_transport(x, y, v);
}

Vec Sphere::curvature(const Vec&, const Vec& X, const Vec& Y,
                      const Vec& Z) const {
  return Y.dot(Z) * X - X.dot(Z) * Y;
}

Vec Sphere::project_tangent(const Vec& x, const Vec& w) const {
  return sphere_project_tangent(x, w);
}

Mat Sphere::tangent_basis(const Vec& x) const {
  return orthonormal_completion(
      dim_ + 1, dim_, [&](const Vec& e) { return sphere_project_tangent(x, e); });
}

void Sphere::check_point(const Vec& x) const {
  Manifold::check_point(x);
  require_unit(x, "sphere");
}

}  // namespace geotrend
