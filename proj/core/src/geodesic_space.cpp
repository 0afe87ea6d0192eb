#include "geotrend/geodesic_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "geotrend/parallel.hpp"

namespace geotrend {

namespace {

bool lexicographic_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

bool ordered(const GeodesicPoint& a, const GeodesicPoint& b) {
  if (lexicographic_less(a.x, b.x)) return true;
  if (lexicographic_less(b.x, a.x)) return false;
  return !lexicographic_less(b.y, a.y);
}

void require_n(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "path resolution n must be >= 1");
}

bool settled(double before, double after, double tol) {
  if (!(before > 0.0)) return true;
  return std::abs(before - after) <= tol * before;
}

// Samples of the geodesic g at every quadrature node, each carrying the
// node's weight.
void append_samples(const Manifold& M, const GeodesicPoint& g,
                    const QuadratureRule& quad, std::vector<Sample>& out) {
  std::vector<Vec> pts;
  M.sample_geodesic(g.x, g.y, quad.nodes, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back({quad.nodes[i], std::move(pts[i]), quad.weights[i]});
  }
}

}  // namespace

double delta_sq(const Manifold& M, const GeodesicPoint& a, const GeodesicPoint& b,
                const QuadratureRule& quad) {
  // Fixed argument order keeps the value bitwise symmetric.
  const GeodesicPoint& p = ordered(a, b) ? a : b;
  const GeodesicPoint& q = ordered(a, b) ? b : a;
  std::vector<Vec> pa;
  std::vector<Vec> pb;
  M.sample_geodesic(p.x, p.y, quad.nodes, pa);
  M.sample_geodesic(q.x, q.y, quad.nodes, pb);
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    s += quad.weights[i] * M.squared_distance(pa[i], pb[i]);
  }
  return s;
}

double discrete_energy(const Manifold& M, const DiscretePath& path,
                       const QuadratureRule& quad) {
  const int n = path.n();
  require_n(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += delta_sq(M, path.nodes[i], path.nodes[i + 1], quad);
  return n * s;
}

double discrete_length(const Manifold& M, const DiscretePath& path,
                       const QuadratureRule& quad) {
  require_n(path.n());
  double s = 0.0;
  for (int i = 0; i < path.n(); ++i) {
    s += std::sqrt(delta_sq(M, path.nodes[i], path.nodes[i + 1], quad));
  }
  return s;
}

double well_defined_radius(const Manifold& M) {
  const double bound = M.curvature_bound();
  double r = M.injectivity_radius();
  // An unbounded curvature bound carries no information; fall back to the
  // injectivity radius alone.
  if (bound > 0.0 && std::isfinite(bound)) {
    r = std::min(r, std::numbers::pi / std::sqrt(bound));
  }
  return 0.5 * r;
}

std::string neighbourhood_violation(const Manifold& M, const GeodesicPoint& a,
                                    const GeodesicPoint& b) {
  const double r = 0.5 * M.injectivity_radius();
  const double dx = M.distance(a.x, b.x);
  const double dy = M.distance(a.y, b.y);
  const double da = M.distance(a.x, a.y);
  const double db = M.distance(b.x, b.y);
  if (std::max({dx, dy, da, db}) < r) return {};
  return "geodesics leave the ball of radius r_inj/2 (max endpoint distance " +
         std::to_string(std::max({dx, dy, da, db})) + ")";
}

DiscretePath linear_path(const Manifold& M, const GeodesicPoint& alpha,
                         const GeodesicPoint& beta, int n) {
  require_n(n);
  DiscretePath path;
  path.nodes.reserve(n + 1);
  path.nodes.push_back(alpha);
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / n;
    path.nodes.push_back({M.geodesic(alpha.x, beta.x, s), M.geodesic(alpha.y, beta.y, s)});
  }
  path.nodes.push_back(beta);
  return path;
}

DiscretePath resample_path(const Manifold& M, const DiscretePath& path, int n) {
  require_n(n);
  const int old_n = path.n();
  require_n(old_n);
  DiscretePath out;
  out.nodes.reserve(n + 1);
  out.nodes.push_back(path.nodes.front());
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) * old_n / n;
    const int j = std::min(static_cast<int>(std::floor(s)), old_n - 1);
    const double frac = s - j;
    const GeodesicPoint& a = path.nodes[j];
    const GeodesicPoint& b = path.nodes[j + 1];
    if (frac == 0.0) {
      out.nodes.push_back(a);
    } else {
      out.nodes.push_back({M.geodesic(a.x, b.x, frac), M.geodesic(a.y, b.y, frac)});
    }
  }
  out.nodes.push_back(path.nodes.back());
  return out;
}

double relax_path(const Manifold& M, DiscretePath& path, const QuadratureRule& quad,
                  const RegressionOptions& node) {
  const int n = path.n();
  require_n(n);
  std::vector<Sample> samples;
  for (int i = 1; i < n; ++i) {
    samples.clear();
    append_samples(M, path.nodes[i - 1], quad, samples);
    append_samples(M, path.nodes[i + 1], quad, samples);
    path.nodes[i] = fit_geodesic(M, samples, path.nodes[i], node).endpoints;
  }
  return discrete_energy(M, path, quad);
}

ShortestPath discrete_shortest_path(const Manifold& M, const GeodesicPoint& alpha,
                                    const GeodesicPoint& beta, int n,
                                    const QuadratureRule& quad,
                                    const PathOptions& opt, const DiscretePath* init) {
  require_n(n);
  ShortestPath out;
  if (auto w = neighbourhood_violation(M, alpha, beta); !w.empty()) {
    out.warnings.push_back(w);
  }
  if (init) {
    if (init->n() != n) {
      throw Error(ErrorKind::InvalidInput, "initial path has the wrong resolution");
    }
    out.path = *init;
    out.path.nodes.front() = alpha;
    out.path.nodes.back() = beta;
  } else {
    out.path = linear_path(M, alpha, beta, n);
  }
  out.energy = discrete_energy(M, out.path, quad);
  out.energy_history.push_back(out.energy);
  if (n == 1) {
    out.converged = true;
    return out;
  }
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    const double before = out.energy;
    out.energy = relax_path(M, out.path, quad, opt.node);
    out.energy_history.push_back(out.energy);
    out.sweeps = sweep + 1;
    if (settled(before, out.energy, opt.relative_tolerance)) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) out.warnings.push_back("shortest path sweeps did not converge");
  return out;
}

GeodesicLog geodesic_log(const Manifold& M, const GeodesicPoint& base,
                         const GeodesicPoint& target, int n,
                         const QuadratureRule& quad, const PathOptions& opt) {
  GeodesicLog out;
  out.path = discrete_shortest_path(M, base, target, n, quad, opt);
  const GeodesicPoint& first = out.path.path.nodes[1];
  out.ux = n * M.log(base.x, first.x);
  out.uy = n * M.log(base.y, first.y);
  return out;
}

MeanGeodesic mean_geodesic(const Manifold& M,
                           const std::vector<GeodesicPoint>& geodesics, int n,
                           const QuadratureRule& quad, const MeanOptions& opt) {
  require_n(n);
  if (geodesics.empty()) {
    throw Error(ErrorKind::InvalidInput, "mean_geodesic: no geodesics");
  }
  const std::size_t N = geodesics.size();
  MeanGeodesic out;

  std::vector<Vec> xs;
  std::vector<Vec> ys;
  for (const auto& g : geodesics) {
    xs.push_back(g.x);
    ys.push_back(g.y);
  }
  out.mean = {frechet_mean(M, xs).mean, frechet_mean(M, ys).mean};
  const double radius = well_defined_radius(M);
  for (const auto& g : geodesics) {
    if (M.distance(out.mean.x, g.x) >= radius || M.distance(out.mean.y, g.y) >= radius) {
      out.warnings.push_back("input geodesics spread beyond the well-definedness radius " +
                             std::to_string(radius));
      break;
    }
  }

  const int threads = resolve_threads(opt.threads);
  auto total = [&] {
    std::vector<double> e(N);
    parallel_for(N, threads, [&](std::size_t j) {
      e[j] = discrete_energy(M, out.paths[j], quad);
    });
    double s = 0.0;
    for (double v : e) s += v;
    return s;
  };

  out.paths.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    out.paths[j].nodes = {out.mean, geodesics[j]};
  }
  const int first_level = opt.cascadic ? 1 : n;
  if (first_level > 1) {
    for (std::size_t j = 0; j < N; ++j) {
      out.paths[j] = linear_path(M, out.mean, geodesics[j], n);
    }
  }

  out.converged = true;
  for (int k = first_level; k <= n; ++k) {
    if (k > first_level) {
      for (auto& p : out.paths) p = resample_path(M, p, k);
    }
    std::vector<double> history{total()};
    bool level_converged = false;
    for (int outer = 0; outer < opt.max_outer; ++outer) {
      std::vector<Sample> samples;
      for (const auto& p : out.paths) append_samples(M, p.nodes[1], quad, samples);
      out.mean = fit_geodesic(M, samples, out.mean, opt.center).endpoints;
      for (auto& p : out.paths) p.nodes.front() = out.mean;
      parallel_for(N, threads, [&](std::size_t j) {
        relax_path(M, out.paths[j], quad, opt.path.node);
      });
      history.push_back(total());
      ++out.outer_iterations;
      if (settled(history[history.size() - 2], history.back(), opt.relative_tolerance)) {
        level_converged = true;
        break;
      }
    }
    out.history.push_back(std::move(history));
    if (!level_converged) {
      out.converged = false;
      out.warnings.push_back("mean iteration did not converge at level " + std::to_string(k));
    }
  }
  out.g_n = out.history.back().back();
  return out;
}

}  // namespace geotrend
