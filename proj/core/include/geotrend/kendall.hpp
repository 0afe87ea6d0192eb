#pragma once

// Kendall shape space: pre-shapes (centered, unit Frobenius norm m x k
// matrices) modulo rotations acting from the left. Shapes are handled through
// pre-shape representatives; binary operations align their second argument to
// the first before doing spherical geometry.

#include "geotrend/manifold.hpp"

namespace geotrend {

struct AlignmentResult {
  Mat rotation;                ///< optimal R in SO(m)
  Vec pseudo_singular_values;  ///< lambda_1 >= ... >= lambda_{m-1} >= |lambda_m|
  bool unique = true;          ///< false iff lambda_{m-1} + lambda_m <= tol
};

struct Alignment {
  Mat y_aligned;  ///< R y, well positioned with respect to x
  AlignmentResult info;
};

inline constexpr double kUniquenessTolerance = 1e-10;

/// The 2x2 complex structure [[0,-1],[1,0]] acting on landmark matrices.
Mat complex_structure();

/// Removes translation and scale. Throws DegenerateConfiguration when all
/// landmarks coincide.
Mat to_preshape(const Mat& raw);

/// True when x is centered and unit norm within tol.
bool is_preshape(const Mat& x, double tol = 1e-12);

Alignment align(const Mat& x, const Mat& y,
                double uniqueness_tol = kUniquenessTolerance);
Mat optimal_rotation(const Mat& x, const Mat& y);

/// Procrustes distance arccos(sum lambda_i), evaluated as the spherical
/// distance between x and the aligned y.
double shape_distance(const Mat& x, const Mat& y);

/// Horizontal geodesic from x through the aligned representative of y.
Mat shape_geodesic(const Mat& x, const Mat& y, double t);

/// Skew generator A of the vertical part A x of w at x, from the linear
/// system A(xx^t) + (xx^t)A = w x^t - x w^t. Throws SingularFiber if
/// rank(x) < m - 1.
Mat vertical_generator(const Mat& x, const Mat& w);
/// Planar closed form A = w x^t - x w^t.
Mat vertical_generator_planar(const Mat& x, const Mat& w);

/// Horizontal part of the ambient matrix w at x. The translation part and the
/// component along x are removed first.
Mat horizontal_project(const Mat& x, const Mat& w);

/// Horizontal lift of the shape-space log. Throws Domain at distance pi/2.
Mat shape_log(const Mat& x, const Mat& y);
Mat shape_exp(const Mat& x, const Mat& u);

// Planar (m = 2) closed forms for well-positioned x, y and horizontal
// arguments. Each throws Unsupported for m != 2.
Mat planar_parallel_transport(const Mat& x, const Mat& y, const Mat& u);
Mat planar_curvature(const Mat& x, const Mat& X, const Mat& Y, const Mat& Z);
double planar_sectional(const Mat& x, const Mat& X, const Mat& Y);

class Kendall final : public Manifold {
 public:
  Kendall(int m, int k);

  int m() const { return m_; }
  int k() const { return k_; }

  std::string name() const override { return "kendall"; }
  int dimension() const override;
  int ambient_dimension() const override { return m_ * k_; }
  double injectivity_radius() const override;
  double curvature_bound() const override;

  double distance(const Vec& x, const Vec& y) const override;
  Vec exp(const Vec& x, const Vec& v) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec geodesic(const Vec& x, const Vec& y, double t) const override;
  void sample_geodesic(const Vec& x, const Vec& y, std::span<const double> ts,
                       std::vector<Vec>& out) const override;
  /// Planar only; the result is a horizontal vector at the given
  /// representative y.
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  bool has_transport() const override { return m_ == 2; }
  bool has_curvature() const override { return m_ == 2; }
  Vec curvature(const Vec& x, const Vec& X, const Vec& Y,
                const Vec& Z) const override;
  Vec project_tangent(const Vec& x, const Vec& w) const override;
  Mat tangent_basis(const Vec& x) const override;
  void check_point(const Vec& x) const override;

  Mat as_matrix(const Vec& v) const;
  static Vec as_vector(const Mat& a);

 private:
  int m_;
  int k_;
};

}  // namespace geotrend
