#include "geotrend/sasaki.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/QR>

#include "geotrend/parallel.hpp"

namespace geotrend {

namespace {

void require_curvature(const Manifold& M, const char* what) {
  if (!M.has_curvature()) {
    throw Error(ErrorKind::Capability,
                std::string(what) + ": manifold " + M.name() +
                    " has no curvature tensor");
  }
}

// Fiber sub-flow at fixed footpoint p over a parameter step h:
//   u' = w, w' = 0, v' = -R(u, w) v.
// R(u + s w, w) = R(u, w), so the operator is constant along the step and v
// is rotated by exp(-h A) with A = R(u, w), applied here as the Cayley
// transform (I + h/2 A)^{-1} (I - h/2 A) solved by fixed-point iteration.
void fiber_step(const Manifold& M, const Vec& p, Vec& u, Vec& v, const Vec& w,
                double h) {
  if (w.squaredNorm() > 0.0 && v.squaredNorm() > 0.0) {
    const Vec rhs = v - 0.5 * h * M.curvature(p, u, w, v);
    Vec next = rhs;
    for (int it = 0; it < 50; ++it) {
      const Vec candidate = rhs - 0.5 * h * M.curvature(p, u, w, next);
      const double change = (candidate - next).norm();
      next = candidate;
      if (change <= 1e-16 * (1.0 + next.norm())) break;
    }
    v = M.project_tangent(p, next);
  }
  u += h * w;
}

Vec coords_to_vector(const Mat& basis, const Eigen::Ref<const Vec>& c) {
  return basis * c;
}

SasakiState initial_state(const Manifold& M, const TangentBundlePoint& base,
                          const TangentBundleVector& vec, int steps) {
  require_curvature(M, "sasaki_exp");
  if (steps < 1) throw Error(ErrorKind::InvalidInput, "sasaki_exp: steps < 1");
  M.check_point(base.p);
  return {base.p, M.project_tangent(base.p, base.u),
          M.project_tangent(base.p, vec.v), M.project_tangent(base.p, vec.w)};
}

// Half fiber step, footpoint geodesic step with transport, half fiber step.
void advance(const Manifold& M, SasakiState& s, double h) {
  fiber_step(M, s.p, s.u, s.v, s.w, 0.5 * h);
  const Vec next = M.exp(s.p, h * s.v);
  if (next != s.p) {
    s.u = M.project_tangent(next, M.transport(s.p, next, s.u));
    s.v = M.project_tangent(next, M.transport(s.p, next, s.v));
    s.w = M.project_tangent(next, M.transport(s.p, next, s.w));
    s.p = next;
  }
  fiber_step(M, s.p, s.u, s.v, s.w, 0.5 * h);
}

}  // namespace

std::vector<SasakiState> sasaki_integrate(const Manifold& M,
                                          const TangentBundlePoint& base,
                                          const TangentBundleVector& vec,
                                          int steps) {
  SasakiState s = initial_state(M, base, vec, steps);
  std::vector<SasakiState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(s);
  for (int k = 0; k < steps; ++k) {
    advance(M, s, 1.0 / steps);
    out.push_back(s);
  }
  return out;
}

TangentBundlePoint sasaki_exp(const Manifold& M, const TangentBundlePoint& base,
                              const TangentBundleVector& vec, int steps) {
  SasakiState s = initial_state(M, base, vec, steps);
  for (int k = 0; k < steps; ++k) advance(M, s, 1.0 / steps);
  return {s.p, s.u};
}

Vec bundle_residual(const Manifold& M, const TangentBundlePoint& a,
                    const TangentBundlePoint& b) {
  const int n = M.ambient_dimension();
  Vec r(2 * n);
  r.head(n) = M.log(a.p, b.p);
  r.tail(n) = M.transport(b.p, a.p, b.u) - a.u;
  return r;
}

SasakiLog sasaki_log(const Manifold& M, const TangentBundlePoint& base,
                     const TangentBundlePoint& target,
                     const SasakiOptions& options,
                     const TangentBundleVector* init) {
  require_curvature(M, "sasaki_log");
  M.check_point(base.p);
  M.check_point(target.p);
  const Mat B = M.tangent_basis(base.p);
  const int d = static_cast<int>(B.cols());

  Vec xi(2 * d);
  if (init) {
    xi.head(d) = B.transpose() * init->v;
    xi.tail(d) = B.transpose() * init->w;
  } else {
    // Flat guess: footpoint log and the transported fiber difference.
    xi.head(d) = B.transpose() * M.log(base.p, target.p);
    xi.tail(d) =
        B.transpose() * (M.transport(target.p, base.p, target.u) - base.u);
  }

  auto shoot = [&](const Vec& c) {
    const TangentBundlePoint end =
        sasaki_exp(M, base, {coords_to_vector(B, c.head(d)),
                             coords_to_vector(B, c.tail(d))},
                   options.steps);
    return bundle_residual(M, end, target);
  };

  Vec r = shoot(xi);
  double res = r.norm();
  int it = 0;
  for (; it < options.log_max_iterations && res > options.log_tolerance; ++it) {
    Mat J(r.size(), 2 * d);
    const double fd = options.fd_step;
    for (int j = 0; j < 2 * d; ++j) {
      Vec plus = xi, minus = xi;
      plus(j) += fd;
      minus(j) -= fd;
      J.col(j) = (shoot(plus) - shoot(minus)) / (2.0 * fd);
    }
    const Vec delta = J.completeOrthogonalDecomposition().solve(-r);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec trial = xi + step * delta;
      const Vec rt = shoot(trial);
      const double rn = rt.norm();
      if (std::isfinite(rn) && rn < res) {
        xi = trial;
        r = rt;
        res = rn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!(res <= options.log_tolerance)) {
    std::ostringstream msg;
    msg << "sasaki_log: shooting did not converge, residual " << res
        << " after " << it << " iterations";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }
  return {{coords_to_vector(B, xi.head(d)), coords_to_vector(B, xi.tail(d))},
          res,
          it};
}

double sasaki_distance(const Manifold& M, const TangentBundlePoint& a,
                       const TangentBundlePoint& b,
                       const SasakiOptions& options) {
  return std::sqrt(sasaki_log(M, a, b, options).vec.squared_norm());
}

SasakiMean sasaki_mean(const Manifold& M,
                       const std::vector<TangentBundlePoint>& points,
                       const SasakiOptions& options) {
  require_curvature(M, "sasaki_mean");
  if (points.empty()) {
    throw Error(ErrorKind::InvalidInput, "sasaki_mean: no points");
  }
  SasakiMean out;
  out.mean = points.front();
  const std::size_t N = points.size();
  std::vector<TangentBundleVector> logs(N);
  for (int it = 0; it < options.mean_max_iterations; ++it) {
    parallel_for(N, options.threads, [&](std::size_t j) {
      logs[j] = sasaki_log(M, out.mean, points[j], options).vec;
    });
    Vec v = Vec::Zero(out.mean.p.size());
    Vec w = Vec::Zero(out.mean.p.size());
    for (const auto& l : logs) {
      v += l.v;
      w += l.w;
    }
    v /= static_cast<double>(N);
    w /= static_cast<double>(N);
    out.iterations = it + 1;
    const double update = std::sqrt(v.squaredNorm() + w.squaredNorm());
    if (update <= options.mean_tolerance) {
      out.converged = true;
      break;
    }
    out.mean = sasaki_exp(M, out.mean, {v, w}, options.steps);
  }
  if (!out.converged) {
    out.warnings.push_back("sasaki_mean: iteration limit reached");
  }
  return out;
}

TangentBundlePoint to_bundle(const Manifold& M, const GeodesicPoint& g) {
  return {g.x, M.log(g.x, g.y)};
}

GeodesicPoint to_geodesic(const Manifold& M, const TangentBundlePoint& b) {
  return {b.p, M.exp(b.p, b.u)};
}

}  // namespace geotrend
