#pragma once

// First stage of the hierarchical model: per-subject geodesic regression,
// Frechet means, coefficient of determination and tangent PCA. Everything
// here is generic over Manifold.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "geotrend/geodesic_point.hpp"
#include "geotrend/manifold.hpp"

namespace geotrend {

/// One weighted observation q at time t. Times may repeat.
struct Sample {
  double t = 0.0;
  Vec q;
  double weight = 1.0;
};

struct RegressionOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
  /// Step of the central differences used to differentiate Phi.
  double fd_step = 1e-5;
  /// Scale the gradient by the inverse of the flat-space Hessian of the
  /// time design (see fit_geodesic). Disable for plain steepest descent.
  bool precondition = true;
};

struct GeodesicFit {
  GeodesicPoint endpoints;
  double f_min = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective at the start and after every accepted step.
  std::vector<double> objective_history;
};

struct GeodesicGradient {
  Vec gx;  ///< tangent at x
  Vec gy;  ///< tangent at y
  double norm() const { return std::sqrt(gx.squaredNorm() + gy.squaredNorm()); }
};

/// F(x, y) = sum_i w_i d^2(q_i, Phi(x, y, t_i)).
double regression_objective(const Manifold& manifold,
                            std::span<const Sample> samples,
                            const GeodesicPoint& g);

/// Gradient of F assembled from grad d^2(., q)(p) = -2 log_p q and central
/// differences of Phi over orthonormal tangent bases at x and y.
GeodesicGradient regression_gradient(const Manifold& manifold,
                                     std::span<const Sample> samples,
                                     const GeodesicPoint& g,
                                     double fd_step = 1e-5);

/// Minimizes F over M x M starting from `init` by Riemannian descent with
/// Armijo backtracking. F is non-increasing along the returned history.
GeodesicFit fit_geodesic(const Manifold& manifold,
                         std::span<const Sample> samples,
                         const GeodesicPoint& init,
                         const RegressionOptions& options = {});

struct Trajectory {
  std::string subject_id;
  std::vector<double> times;
  std::vector<Vec> observations;
  std::string group;
};

/// Throws InvalidInput unless times are strictly increasing, there are at
/// least two of them and they match the observations.
void validate_trajectory(const Trajectory& trajectory);

/// Affine map of the times onto [0, 1].
std::vector<double> normalize_times(std::span<const double> times);

struct FrechetOptions {
  double step_tolerance = 1e-12;
  int max_iterations = 1000;
};

struct FrechetMean {
  Vec mean;
  double g_min = 0.0;  ///< sum_i w_i d^2(q_i, mean)
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Weighted Frechet mean by iterated tangent averaging, started at the first
/// point.
FrechetMean frechet_mean(const Manifold& manifold, std::span<const Vec> points,
                         std::span<const double> weights = {},
                         const FrechetOptions& options = {});

struct FittedGeodesic {
  std::string subject_id;
  std::string group;
  GeodesicPoint endpoints;
  double f_min = 0.0;
  double g_min = 0.0;
  double r_squared = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<std::string> warnings;
};

/// Fits one subject: times are normalized, the fit starts at (q_1, q_N) and
/// G_min is taken about the subject's Frechet mean.
FittedGeodesic geodesic_regression(const Manifold& manifold,
                                   const Trajectory& trajectory,
                                   std::span<const double> weights = {},
                                   const RegressionOptions& options = {});

/// 1 - f_min / g_min. Throws UndefinedVariance for g_min == 0.
double r_squared(double f_min, double g_min);

struct PooledRSquared {
  double f_sum = 0.0;
  double g_sum = 0.0;
  double r_squared = 0.0;
};

/// R^2 from the summed per-subject F_min and G_min.
PooledRSquared pooled_r_squared(std::span<const FittedGeodesic> fits);

struct TangentPCA {
  Vec mean;
  Mat basis;        ///< orthonormal tangent basis at the mean (columns)
  Vec eigenvalues;  ///< all eigenvalues, decreasing
  Mat directions;   ///< ambient principal directions (columns)
  Mat scores;       ///< one row per input point
  std::vector<std::string> warnings;
};

TangentPCA tangent_pca(const Manifold& manifold, std::span<const Vec> points,
                       int n_components);

/// Scores of further points in an existing tangent PCA.
Mat tangent_pca_scores(const Manifold& manifold, const TangentPCA& pca,
                       std::span<const Vec> points);

/// Largest pairwise distance among the points; used for spread warnings.
double max_pairwise_distance(const Manifold& manifold,
                             std::span<const Vec> points);

}  // namespace geotrend
