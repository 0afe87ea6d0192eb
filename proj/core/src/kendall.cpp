#include "geotrend/kendall.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "geotrend/sphere.hpp"

namespace geotrend {

namespace {

Vec flat(const Mat& a) { return Eigen::Map<const Vec>(a.data(), a.size()); }

Mat unflat(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

double inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

Mat center(const Mat& a) { return a.colwise() - a.rowwise().mean(); }

void require_planar(const Mat& x, const char* what) {
  if (x.rows() != 2) {
    throw Error(ErrorKind::Unsupported, std::string(what) + ": requires m = 2");
  }
}

Mat rotation2(double theta) {
  Mat r(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r << c, -s, s, c;
  return r;
}

}  // namespace

Mat complex_structure() {
  Mat c(2, 2);
  c << 0.0, -1.0, 1.0, 0.0;
  return c;
}

Mat to_preshape(const Mat& raw) {
  if (raw.rows() < 1 || raw.cols() < 2 || !raw.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "to_preshape: invalid landmark matrix");
  }
  Mat c = center(raw);
  const double n = c.norm();
  if (n <= 1e-12) {
    throw Error(ErrorKind::DegenerateConfiguration,
                "to_preshape: all landmarks coincide");
  }
  return c / n;
}

bool is_preshape(const Mat& x, double tol) {
  return x.allFinite() && x.rowwise().sum().cwiseAbs().maxCoeff() <= tol &&
         std::abs(x.norm() - 1.0) <= tol;
}

Mat optimal_rotation(const Mat& x, const Mat& y) {
  const Mat M = y * x.transpose();
  if (M.rows() == 2) {
    const double a = M(0, 0) + M(1, 1);
    const double b = M(0, 1) - M(1, 0);
    if (a == 0.0 && b == 0.0) return Mat::Identity(2, 2);
    return rotation2(std::atan2(b, a));
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat& U = svd.matrixU();
  const Mat& V = svd.matrixV();
  Mat D = Mat::Identity(M.rows(), M.rows());
  if ((V * U.transpose()).determinant() < 0.0) {
    D(M.rows() - 1, M.rows() - 1) = -1.0;
  }
  return V * D * U.transpose();
}

Alignment align(const Mat& x, const Mat& y, double uniqueness_tol) {
  const Mat M = y * x.transpose();
  const Eigen::Index m = M.rows();
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat& U = svd.matrixU();
  const Mat& V = svd.matrixV();
  Vec lambda = svd.singularValues();
  Mat D = Mat::Identity(m, m);
  if ((V * U.transpose()).determinant() < 0.0) {
    D(m - 1, m - 1) = -1.0;
    lambda(m - 1) = -lambda(m - 1);
  }
  Alignment out;
  out.info.rotation = (m == 2) ? optimal_rotation(x, y) : Mat(V * D * U.transpose());
  out.info.pseudo_singular_values = lambda;
  out.info.unique = lambda(m - 2) + lambda(m - 1) > uniqueness_tol;
  out.y_aligned = out.info.rotation * y;
  return out;
}

double shape_distance(const Mat& x, const Mat& y) {
  const Mat ya = optimal_rotation(x, y) * y;
  return sphere_distance(flat(x), flat(ya));
}

Mat shape_geodesic(const Mat& x, const Mat& y, double t) {
  const Mat ya = optimal_rotation(x, y) * y;
  return unflat(slerp(flat(x), flat(ya), t), x.rows(), x.cols());
}

Mat vertical_generator_planar(const Mat& x, const Mat& w) {
  require_planar(x, "vertical_generator_planar");
  return w * x.transpose() - x * w.transpose();
}

Mat vertical_generator(const Mat& x, const Mat& w) {
  const Eigen::Index m = x.rows();
  Eigen::JacobiSVD<Mat> sv(x);
  const Vec s = sv.singularValues();
  if (m >= 2 && s(m - 2) < 1e-10) {
    throw Error(ErrorKind::SingularFiber,
                "vertical_generator: pre-shape rank below m - 1");
  }
  const Mat S = x * x.transpose();
  const Mat rhs = w * x.transpose() - x * w.transpose();
  const Eigen::Index n = m * (m - 1) / 2;
  Mat system(m * m, n);
  Eigen::Index col = 0;
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = p + 1; q < m; ++q) {
      Mat B = Mat::Zero(m, m);
      B(p, q) = 1.0;
      B(q, p) = -1.0;
      const Mat image = B * S + S * B;
      system.col(col++) = flat(image);
    }
  }
  const Vec coeffs = system.colPivHouseholderQr().solve(flat(rhs));
  Mat A = Mat::Zero(m, m);
  col = 0;
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = p + 1; q < m; ++q) {
      A(p, q) = coeffs(col);
      A(q, p) = -coeffs(col);
      ++col;
    }
  }
  return A;
}

Mat horizontal_project(const Mat& x, const Mat& w) {
  Mat t = center(w);
  t -= inner(x, t) * x;
  const Mat A = (x.rows() == 2) ? vertical_generator_planar(x, t)
                                : vertical_generator(x, t);
  return t - A * x;
}

Mat shape_log(const Mat& x, const Mat& y) {
  const Mat ya = optimal_rotation(x, y) * y;
  const Vec xv = flat(x);
  const Vec yv = flat(ya);
  if (sphere_distance(xv, yv) >= std::numbers::pi / 2 - 1e-12) {
    throw Error(ErrorKind::Domain, "shape_log: shapes at maximal distance");
  }
  return unflat(sphere_log(xv, yv), x.rows(), x.cols());
}

Mat shape_exp(const Mat& x, const Mat& u) {
  return unflat(sphere_exp(flat(x), flat(u)), x.rows(), x.cols());
}

Mat planar_parallel_transport(const Mat& x, const Mat& y, const Mat& u) {
  require_planar(x, "planar_parallel_transport");
  const Vec xv = flat(x);
  const Vec yv = flat(y);
  const double phi = sphere_distance(xv, yv);
  if (phi == 0.0) return u;
  const Mat s = x + y;
  const double s2 = s.squaredNorm();
  if (s2 < 1e-24) {
    throw Error(ErrorKind::Domain, "planar_parallel_transport: antipodal");
  }
  const Mat v = unflat(sphere_log(xv, yv), x.rows(), x.cols()) / phi;
  const Mat C = u * v.transpose() - v * u.transpose();
  return u - (2.0 / s2) * (inner(u, y) * s + std::sin(phi) * (C * s));
}

Mat planar_curvature(const Mat& x, const Mat& X, const Mat& Y, const Mat& Z) {
  require_planar(x, "planar_curvature");
  const Mat J = complex_structure();
  const Mat JX = J * X;
  const Mat JY = J * Y;
  return inner(Y, Z) * X - inner(X, Z) * Y + inner(JY, Z) * JX -
         inner(JX, Z) * JY - 2.0 * inner(JX, Y) * (J * Z);
}

double planar_sectional(const Mat& x, const Mat& X, const Mat& Y) {
  require_planar(x, "planar_sectional");
  const double area = X.squaredNorm() * Y.squaredNorm() - inner(X, Y) * inner(X, Y);
  const double scale = X.squaredNorm() * Y.squaredNorm();
  if (!(area > 1e-14 * scale) || scale == 0.0) {
    throw Error(ErrorKind::Domain, "planar_sectional: degenerate plane");
  }
  const double h = inner(X, complex_structure() * Y);
  return 1.0 + 3.0 * h * h / area;
}

Kendall::Kendall(int m, int k) : m_(m), k_(k) {
  if (m < 2 || k < 3) {
    throw Error(ErrorKind::InvalidInput, "kendall: requires m >= 2, k >= 3");
  }
  if (k <= m - 1) {
    throw Error(ErrorKind::InvalidInput, "kendall: k too small for m");
  }
}

int Kendall::dimension() const {
  return m_ * (k_ - 1) - 1 - m_ * (m_ - 1) / 2;
}

double Kendall::injectivity_radius() const { return std::numbers::pi / 2; }

double Kendall::curvature_bound() const {
  // Planar shape space is CP^{k-2} with sectional curvature in [1, 4].
  return m_ == 2 ? 4.0 : std::numeric_limits<double>::infinity();
}

Mat Kendall::as_matrix(const Vec& v) const { return unflat(v, m_, k_); }

Vec Kendall::as_vector(const Mat& a) { return flat(a); }

double Kendall::distance(const Vec& x, const Vec& y) const {
  return shape_distance(as_matrix(x), as_matrix(y));
}

Vec Kendall::exp(const Vec& x, const Vec& v) const { return sphere_exp(x, v); }

Vec Kendall::log(const Vec& x, const Vec& y) const {
  return flat(shape_log(as_matrix(x), as_matrix(y)));
}

Vec Kendall::geodesic(const Vec& x, const Vec& y, double t) const {
  return flat(shape_geodesic(as_matrix(x), as_matrix(y), t));
}

void Kendall::sample_geodesic(const Vec& x, const Vec& y,
                              std::span<const double> ts,
                              std::vector<Vec>& out) const {
  const Mat xm = as_matrix(x);
  const Vec ya = flat(optimal_rotation(xm, as_matrix(y)) * as_matrix(y));
  out.resize(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) out[i] = slerp(x, ya, ts[i]);
}

Vec Kendall::transport(const Vec& x, const Vec& y, const Vec& v) const {
  if (m_ != 2) {
    throw Error(ErrorKind::Unsupported,
                "kendall: parallel transport is implemented for m = 2 only");
  }
  const Mat xm = as_matrix(x);
  const Mat ym = as_matrix(y);
  const Mat R = optimal_rotation(xm, ym);
  const Mat w = planar_parallel_transport(xm, R * ym, as_matrix(v));
  return flat(R.transpose() * w);
}

Vec Kendall::curvature(const Vec& x, const Vec& X, const Vec& Y,
                       const Vec& Z) const {
  if (m_ != 2) {
    throw Error(ErrorKind::Capability,
                "kendall: curvature tensor is implemented for m = 2 only");
  }
  return flat(planar_curvature(as_matrix(x), as_matrix(X), as_matrix(Y),
                               as_matrix(Z)));
}

Vec Kendall::project_tangent(const Vec& x, const Vec& w) const {
  return flat(horizontal_project(as_matrix(x), as_matrix(w)));
}

Mat Kendall::tangent_basis(const Vec& x) const {
  const Mat xm = as_matrix(x);
  return orthonormal_completion(m_ * k_, dimension(), [&](const Vec& e) {
    return flat(horizontal_project(xm, as_matrix(e)));
  });
}

void Kendall::check_point(const Vec& x) const {
  Manifold::check_point(x);
  if (!is_preshape(as_matrix(x), 1e-10)) {
    throw Error(ErrorKind::InvalidInput, "kendall: not a pre-shape");
  }
}

}  // namespace geotrend
