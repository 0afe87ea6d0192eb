#include "geotrend/manifold.hpp"

#include <cmath>
#include <limits>

namespace geotrend {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DegenerateConfiguration: return "degenerate_configuration";
    case ErrorKind::SingularFiber: return "singular_fiber";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::UndefinedVariance: return "undefined_variance";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Vec Manifold::geodesic(const Vec& x, const Vec& y, double t) const {
  return exp(x, t * log(x, y));
}

void Manifold::sample_geodesic(const Vec& x, const Vec& y,
                               std::span<const double> ts,
                               std::vector<Vec>& out) const {
  const Vec v = log(x, y);
  out.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = exp(x, ts[i] * v);
}

Vec Manifold::curvature(const Vec&, const Vec&, const Vec&, const Vec&) const {
  throw Error(ErrorKind::Capability,
              name() + ": curvature tensor is not available");
}

void Manifold::check_point(const Vec& x) const {
  if (x.size() != ambient_dimension()) {
    throw Error(ErrorKind::InvalidInput,
                name() + ": point has wrong ambient dimension");
  }
}

Euclidean::Euclidean(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "euclidean: dim < 1");
}

double Euclidean::injectivity_radius() const {
  return std::numeric_limits<double>::infinity();
}

double Euclidean::distance(const Vec& x, const Vec& y) const {
  return (y - x).norm();
}

Vec Euclidean::exp(const Vec& x, const Vec& v) const { return x + v; }

Vec Euclidean::log(const Vec& x, const Vec& y) const { return y - x; }

Vec Euclidean::geodesic(const Vec& x, const Vec& y, double t) const {
  return x + t * (y - x);
}

void Euclidean::sample_geodesic(const Vec& x, const Vec& y,
                                std::span<const double> ts,
                                std::vector<Vec>& out) const {
  const Vec v = y - x;
  out.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = x + ts[i] * v;
}

Vec Euclidean::transport(const Vec&, const Vec&, const Vec& v) const {
  return v;
}

Vec Euclidean::curvature(const Vec& x, const Vec&, const Vec&,
                         const Vec&) const {
  return Vec::Zero(x.size());
}

Vec Euclidean::project_tangent(const Vec&, const Vec& w) const { return w; }

Mat Euclidean::tangent_basis(const Vec&) const {
  return Mat::Identity(dim_, dim_);
}

void Euclidean::check_point(const Vec& x) const {
  Manifold::check_point(x);
  if (!x.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "euclidean: non-finite point");
  }
}

Vec riemannian_gradient_fd(const Manifold& manifold, const ScalarField& f,
                           const Vec& x, double h) {
  const Mat basis = manifold.tangent_basis(x);
  Vec grad = Vec::Zero(x.size());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const Vec e = basis.col(j);
    const double fp = f(manifold.exp(x, h * e));
    const double fm = f(manifold.exp(x, -h * e));
    grad += ((fp - fm) / (2.0 * h)) * e;
  }
  return grad;
}

Mat orthonormal_completion(int ambient_dim, int target_dim,
                           const std::function<Vec(const Vec&)>& project,
                           double skip_tol) {
  Mat basis(ambient_dim, target_dim);
  int found = 0;
  for (int i = 0; i < ambient_dim && found < target_dim; ++i) {
    Vec c = project(Vec::Unit(ambient_dim, i));
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < found; ++j) {
        c -= basis.col(j).dot(c) * basis.col(j);
      }
    }
    const double n = c.norm();
    if (n < skip_tol) continue;
    basis.col(found++) = c / n;
  }
  if (found != target_dim) {
    throw Error(ErrorKind::Domain,
                "orthonormal_completion: tangent space rank deficient");
  }
  return basis;
}

}  // namespace geotrend
