#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "geotrend/types.hpp"

namespace geotrend {

/// Riemannian manifold embedded in a Euclidean ambient space.
///
/// Points and tangent vectors are ambient vectors; the metric is the one
/// induced by the ambient inner product. Implementations are immutable and
/// every member is safe to call concurrently.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  /// Intrinsic dimension (size of tangent_basis).
  virtual int dimension() const = 0;
  virtual int ambient_dimension() const = 0;
  /// Lower bound on the injectivity radius; infinity for flat spaces.
  virtual double injectivity_radius() const = 0;
  /// Upper bound on sectional curvature (0 for flat spaces).
  virtual double curvature_bound() const = 0;

  virtual double distance(const Vec& x, const Vec& y) const = 0;
  virtual Vec exp(const Vec& x, const Vec& v) const = 0;
  virtual Vec log(const Vec& x, const Vec& y) const = 0;

  /// Phi(x, y, t) = exp_x(t log_x y).
  virtual Vec geodesic(const Vec& x, const Vec& y, double t) const;

  /// Evaluates Phi(x, y, t) at several parameters. Implementations may share
  /// work (alignment, logs) across the parameters.
  virtual void sample_geodesic(const Vec& x, const Vec& y,
                               std::span<const double> ts,
                               std::vector<Vec>& out) const;

  /// Parallel transport of v in T_x along the minimizing geodesic to y.
  virtual Vec transport(const Vec& x, const Vec& y, const Vec& v) const = 0;
  virtual bool has_transport() const { return true; }

  virtual bool has_curvature() const { return false; }
  /// Curvature tensor R(X, Y)Z at x, convention R(X,Y) = [D_X, D_Y] - D_[X,Y].
  virtual Vec curvature(const Vec& x, const Vec& X, const Vec& Y,
                        const Vec& Z) const;

  virtual Vec project_tangent(const Vec& x, const Vec& w) const = 0;
  /// Orthonormal basis of T_x as columns (ambient_dimension x dimension).
  virtual Mat tangent_basis(const Vec& x) const = 0;

  /// Throws InvalidInput if x is not a point of the manifold.
  virtual void check_point(const Vec& x) const;

  double squared_distance(const Vec& x, const Vec& y) const {
    const double d = distance(x, y);
    return d * d;
  }
};

/// Flat R^d; used as the reference geometry in closed-form tests.
class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int dim);

  std::string name() const override { return "euclidean"; }
  int dimension() const override { return dim_; }
  int ambient_dimension() const override { return dim_; }
  double injectivity_radius() const override;
  double curvature_bound() const override { return 0.0; }

  double distance(const Vec& x, const Vec& y) const override;
  Vec exp(const Vec& x, const Vec& v) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec geodesic(const Vec& x, const Vec& y, double t) const override;
  void sample_geodesic(const Vec& x, const Vec& y, std::span<const double> ts,
                       std::vector<Vec>& out) const override;
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  bool has_curvature() const override { return true; }
  Vec curvature(const Vec& x, const Vec& X, const Vec& Y,
                const Vec& Z) const override;
  Vec project_tangent(const Vec& x, const Vec& w) const override;
  Mat tangent_basis(const Vec& x) const override;
  void check_point(const Vec& x) const override;

 private:
  int dim_;
};

using ScalarField = std::function<double(const Vec&)>;

/// Central finite-difference Riemannian gradient of f at x: differences of
/// f(exp_x(+-h e_j)) over an orthonormal tangent basis {e_j}.
Vec riemannian_gradient_fd(const Manifold& manifold, const ScalarField& f,
                           const Vec& x, double h = 1e-5);

/// Gram-Schmidt completion of `fixed` (orthonormal columns, may be empty)
/// by projected ambient unit vectors. `project` maps an ambient vector into
/// the target subspace; candidates whose residual norm is below `skip_tol`
/// are dropped. Two orthogonalisation passes are applied per candidate.
Mat orthonormal_completion(int ambient_dim, int target_dim,
                           const std::function<Vec(const Vec&)>& project,
                           double skip_tol = 1e-8);

}  // namespace geotrend
