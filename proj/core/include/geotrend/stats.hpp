#pragma once

// Two-group statistics on the space of geodesics: per-group second-moment
// matrices of geodesic logs at the group mean, a Hotelling-type T² and its
// permutation test.

#include <cstdint>
#include <string>
#include <vector>

#include "geotrend/geodesic_space.hpp"

namespace geotrend {

struct GroupSample {
  std::string label;
  std::vector<GeodesicPoint> geodesics;
};

struct StatsOptions {
  /// Segments of the discrete paths used for means and logs.
  int n = 4;
  QuadratureRule quad = default_quadrature();
  MeanOptions mean;
  PathOptions log;
  /// Eigenvalues below this times the largest are dropped when inverting.
  double pinv_tolerance = 1e-8;
  /// p = (#{>=} + 1) / (B + 1) instead of #{>=} / B.
  bool smoothed_p = false;
  int threads = 1;
};

/// Coordinates of the tangent pair (ux at mean.x, uy at mean.y) over the
/// manifold's orthonormal bases, stacked.
Vec pair_coordinates(const Manifold& manifold, const GeodesicPoint& mean,
                     const Vec& ux, const Vec& uy);

/// (1/N) sum c_j c_j^T over the pair coordinates of the geodesic logs of the
/// sample at `mean`.
Mat group_covariance(const Manifold& manifold, const GroupSample& sample,
                     const GeodesicPoint& mean, const StatsOptions& options = {});

/// Pseudo-inverse of a symmetric positive semi-definite matrix by
/// eigendecomposition; eigenvalues <= rel_tol * largest are treated as zero.
Mat psd_pseudo_inverse(const Mat& w, double rel_tol);

struct HotellingResult {
  double t2 = 0.0;
  GeodesicPoint mean_x;
  GeodesicPoint mean_y;
  /// Pair coordinates of log_{mean_x} mean_y and log_{mean_y} mean_x.
  Vec vx;
  Vec vy;
  Mat wx;
  Mat wy;
  std::vector<std::string> warnings;
};

/// t² = (vx^T Wx^+ vx + vy^T Wy^+ vy) / 2.
HotellingResult hotelling(const Manifold& manifold, const GroupSample& gx,
                          const GroupSample& gy, const StatsOptions& options = {});
double hotelling_t2(const Manifold& manifold, const GroupSample& gx,
                    const GroupSample& gy, const StatsOptions& options = {});

struct TestResult {
  double t2 = 0.0;
  double p_value = 1.0;
  int permutations = 0;
  bool smoothed = false;
  /// Statistic of each relabeling, in permutation index order.
  std::vector<double> null_t2;
  std::vector<std::string> warnings;
};

/// B relabelings with group sizes preserved; relabeling b is a Fisher-Yates
/// shuffle driven by derive_seed(seed, b), so results do not depend on the
/// thread count.
TestResult permutation_test(const Manifold& manifold, const GroupSample& gx,
                            const GroupSample& gy, int permutations,
                            std::uint64_t seed, const StatsOptions& options = {});

}  // namespace geotrend
