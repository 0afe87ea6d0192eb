#pragma once

#include "geotrend/manifold.hpp"

namespace geotrend {

/// Unit-norm tolerance used by the sphere input checks.
inline constexpr double kUnitTolerance = 1e-12;

// Great-circle geometry of the unit sphere in R^{d+1}. These functions take
// ambient vectors; non-unit arguments raise ErrorKind::InvalidInput.
double sphere_distance(const Vec& x, const Vec& y);
Vec sphere_log(const Vec& x, const Vec& y);
Vec sphere_exp(const Vec& x, const Vec& v);
/// Spherical linear interpolation; t outside [0, 1] extrapolates along the
/// great circle. Throws Domain for antipodal endpoints.
Vec slerp(const Vec& x, const Vec& y, double t);
Vec sphere_parallel_transport(const Vec& x, const Vec& y, const Vec& v);
Vec sphere_project_tangent(const Vec& x, const Vec& w);

void require_unit(const Vec& x, const char* what,
                  double tol = kUnitTolerance);

class Sphere final : public Manifold {
 public:
  /// Sphere S^dim embedded in R^{dim+1}.
  explicit Sphere(int dim);

  std::string name() const override { return "sphere"; }
  int dimension() const override { return dim_; }
  int ambient_dimension() const override { return dim_ + 1; }
  double injectivity_radius() const override;
  double curvature_bound() const override { return 1.0; }

  double distance(const Vec& x, const Vec& y) const override;
  Vec exp(const Vec& x, const Vec& v) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec geodesic(const Vec& x, const Vec& y, double t) const override;
  void sample_geodesic(const Vec& x, const Vec& y, std::span<const double> ts,
                       std::vector<Vec>& out) const override;
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  bool has_curvature() const override { return true; }
  /// Constant curvature one: R(X,Y)Z = <Y,Z>X - <X,Z>Y.
  Vec curvature(const Vec& x, const Vec& X, const Vec& Y,
                const Vec& Z) const override;
  Vec project_tangent(const Vec& x, const Vec& w) const override;
  Mat tangent_basis(const Vec& x) const override;
  void check_point(const Vec& x) const override;

 private:
  int dim_;
};

}  // namespace geotrend
