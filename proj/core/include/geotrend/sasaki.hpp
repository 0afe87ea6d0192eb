#pragma once

// Sasaki metric on the tangent bundle of a manifold with a curvature
// tensor. Geodesics (p(s), u(s)) satisfy, with v = p' and w = u',
//   D_v v = -R(u, w) v,   D_v w = 0.

#include <string>
#include <vector>

#include "geotrend/geodesic_point.hpp"
#include "geotrend/manifold.hpp"

namespace geotrend {

struct TangentBundlePoint {
  Vec p;  ///< footpoint
  Vec u;  ///< tangent at p
};

/// Tangent vector of the bundle at (p, u): horizontal part v, vertical w.
struct TangentBundleVector {
  Vec v;
  Vec w;
  double squared_norm() const { return v.squaredNorm() + w.squaredNorm(); }
};

/// Full state along an integrated Sasaki geodesic.
struct SasakiState {
  Vec p;
  Vec u;
  Vec v;
  Vec w;
};

struct SasakiOptions {
  /// Integration steps over s in [0, 1].
  int steps = 100;
  /// Shooting stops once the endpoint residual is below this.
  double log_tolerance = 1e-10;
  int log_max_iterations = 60;
  /// Central-difference step for the shooting Jacobian.
  double fd_step = 1e-6;
  /// Karcher iteration stops when the mean update norm is below this.
  double mean_tolerance = 1e-9;
  int mean_max_iterations = 100;
  int threads = 1;
};

/// Integrates the geodesic equations from (base, vec) and returns the
/// steps + 1 states at s = 0, 1/steps, ..., 1. Each step is a symmetric
/// splitting: half a fiber step (u += h/2 w, v rotated by the Cayley
/// transform of -h/2 R(u, w)), a geodesic step of the footpoint with
/// parallel transport of u, v, w, and another half fiber step. Both
/// sub-steps preserve |v| and |w|. Throws Capability if the manifold has no
/// curvature tensor.
std::vector<SasakiState> sasaki_integrate(const Manifold& manifold,
                                          const TangentBundlePoint& base,
                                          const TangentBundleVector& vec,
                                          int steps = 100);

TangentBundlePoint sasaki_exp(const Manifold& manifold,
                              const TangentBundlePoint& base,
                              const TangentBundleVector& vec, int steps = 100);

struct SasakiLog {
  TangentBundleVector vec;
  double residual = 0.0;
  int iterations = 0;
};

/// Shooting for the initial vector: damped Gauss-Newton on tangent basis
/// coordinates at base with a central-difference Jacobian. `init` seeds the
/// solve (defaults to the flat guess). Throws NonConvergence carrying the
/// residual when the tolerance is not met.
SasakiLog sasaki_log(const Manifold& manifold, const TangentBundlePoint& base,
                     const TangentBundlePoint& target,
                     const SasakiOptions& options = {},
                     const TangentBundleVector* init = nullptr);

/// Sasaki distance, the norm of the log.
double sasaki_distance(const Manifold& manifold, const TangentBundlePoint& a,
                       const TangentBundlePoint& b,
                       const SasakiOptions& options = {});

struct SasakiMean {
  TangentBundlePoint mean;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Karcher mean by averaging logs at the current estimate and stepping
/// along the exponential, started at the first point.
SasakiMean sasaki_mean(const Manifold& manifold,
                       const std::vector<TangentBundlePoint>& points,
                       const SasakiOptions& options = {});

/// Endpoint pair (x, y) to (x, log_x y) and back via exp.
TangentBundlePoint to_bundle(const Manifold& manifold, const GeodesicPoint& g);
GeodesicPoint to_geodesic(const Manifold& manifold, const TangentBundlePoint& b);

/// Residual between two bundle points expressed at a: (log_a.p b.p,
/// transport(b.p -> a.p) b.u - a.u), both ambient vectors at a.p.
Vec bundle_residual(const Manifold& manifold, const TangentBundlePoint& a,
                    const TangentBundlePoint& b);

}  // namespace geotrend
