#pragma once

// The space of geodesics of a manifold, each geodesic stored by its
// endpoints, with the L2 metric of curves restricted to it. Shortest paths
// and means are computed by time-discrete variational schemes.

#include <string>
#include <vector>

#include "geotrend/geodesic_point.hpp"
#include "geotrend/manifold.hpp"
#include "geotrend/regression.hpp"

namespace geotrend {

/// n + 1 nodes H_0, ..., H_n.
struct DiscretePath {
  std::vector<GeodesicPoint> nodes;
  int n() const { return static_cast<int>(nodes.size()) - 1; }
};

/// sum_i w_i d^2(Phi(a, t_i), Phi(b, t_i)).
double delta_sq(const Manifold& manifold, const GeodesicPoint& a,
                const GeodesicPoint& b, const QuadratureRule& quad);

/// n * sum_i delta^2(H_i, H_{i+1}).
double discrete_energy(const Manifold& manifold, const DiscretePath& path,
                       const QuadratureRule& quad);

/// sum_i delta(H_i, H_{i+1}).
double discrete_length(const Manifold& manifold, const DiscretePath& path,
                       const QuadratureRule& quad);

/// Empty if a and b lie in a common ball of radius r_inj / 2 about a's
/// endpoints, else a description of the violation.
std::string neighbourhood_violation(const Manifold& manifold,
                                    const GeodesicPoint& a,
                                    const GeodesicPoint& b);

/// Endpoint-wise geodesic interpolation H_i = (Phi(x_0, x_n, i/n),
/// Phi(y_0, y_n, i/n)).
DiscretePath linear_path(const Manifold& manifold, const GeodesicPoint& alpha,
                         const GeodesicPoint& beta, int n);

/// Resamples a path at n + 1 equidistant parameters, interpolating between
/// neighbouring nodes endpoint-wise.
DiscretePath resample_path(const Manifold& manifold, const DiscretePath& path,
                           int n);

struct PathOptions {
  int max_sweeps = 100;
  double relative_tolerance = 1e-9;
  /// Options of the two-neighbour regression replacing each node.
  RegressionOptions node;
  PathOptions() {
    node.gradient_tolerance = 1e-10;
    node.max_iterations = 200;
  }
};

struct ShortestPath {
  DiscretePath path;
  double energy = 0.0;
  int sweeps = 0;
  bool converged = false;
  /// Energy of the initial path and after each sweep.
  std::vector<double> energy_history;
  std::vector<std::string> warnings;
};

/// Replaces H_i by the minimizer of delta^2(H_{i-1}, .) + delta^2(., H_{i+1})
/// for i = 1, ..., n-1 in order; one call is one sweep. Returns the new
/// energy.
double relax_path(const Manifold& manifold, DiscretePath& path,
                  const QuadratureRule& quad, const RegressionOptions& node);

/// Discrete shortest path from alpha to beta by repeated sweeps, started at
/// linear_path(alpha, beta, n) or at `init` when given.
ShortestPath discrete_shortest_path(const Manifold& manifold,
                                    const GeodesicPoint& alpha,
                                    const GeodesicPoint& beta, int n,
                                    const QuadratureRule& quad,
                                    const PathOptions& options = {},
                                    const DiscretePath* init = nullptr);

struct GeodesicLog {
  Vec ux;  ///< tangent at base.x
  Vec uy;  ///< tangent at base.y
  ShortestPath path;
};

/// Log map surrogate: the first step of the discrete shortest path scaled
/// by n, (n log_{x_0} x_1, n log_{y_0} y_1).
GeodesicLog geodesic_log(const Manifold& manifold, const GeodesicPoint& base,
                         const GeodesicPoint& target, int n,
                         const QuadratureRule& quad,
                         const PathOptions& options = {});

struct MeanOptions {
  int max_outer = 100;
  double relative_tolerance = 1e-9;
  /// Solve for k = 1, ..., n, each solution initializing the next.
  bool cascadic = true;
  PathOptions path;
  /// Mean update; a regression against the first interior nodes.
  RegressionOptions center;
  int threads = 1;
  MeanOptions() {
    center.gradient_tolerance = 1e-10;
    center.max_iterations = 500;
  }
};

struct MeanGeodesic {
  GeodesicPoint mean;
  std::vector<DiscretePath> paths;
  /// G_n at the returned mean.
  double g_n = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  /// G_k after each outer iteration, one list per cascade level k.
  std::vector<std::vector<double>> history;
  std::vector<std::string> warnings;
};

/// Minimizes G_n(H) = sum_j min E_n over paths from H to the j-th geodesic,
/// alternating center updates with one sweep per path.
MeanGeodesic mean_geodesic(const Manifold& manifold,
                           const std::vector<GeodesicPoint>& geodesics, int n,
                           const QuadratureRule& quad,
                           const MeanOptions& options = {});

/// Radius within which means in the space of geodesics are well defined:
/// min(r_inj, pi / sqrt(curvature bound)) / 2.
double well_defined_radius(const Manifold& manifold);

}  // namespace geotrend
