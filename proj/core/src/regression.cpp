#include "geotrend/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace geotrend {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Distinct sample times; every sample points at its slot.
struct Design {
  std::vector<double> ts;
  std::vector<std::size_t> slot;
};

Design make_design(std::span<const Sample> samples) {
  Design d;
  d.ts.reserve(samples.size());
  for (const auto& s : samples) d.ts.push_back(s.t);
  std::sort(d.ts.begin(), d.ts.end());
  d.ts.erase(std::unique(d.ts.begin(), d.ts.end()), d.ts.end());
  d.slot.reserve(samples.size());
  for (const auto& s : samples) {
    d.slot.push_back(static_cast<std::size_t>(
        std::lower_bound(d.ts.begin(), d.ts.end(), s.t) - d.ts.begin()));
  }
  return d;
}

double evaluate(const Manifold& M, std::span<const Sample> samples,
                const Design& design, const GeodesicPoint& g,
                std::vector<Vec>& phi) {
  M.sample_geodesic(g.x, g.y, design.ts, phi);
  double f = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    f += samples[i].weight * M.squared_distance(samples[i].q, phi[design.slot[i]]);
  }
  return f;
}

GeodesicGradient assemble_gradient(const Manifold& M,
                                   std::span<const Sample> samples,
                                   const Design& design, const GeodesicPoint& g,
                                   double h) {
  std::vector<Vec> phi;
  M.sample_geodesic(g.x, g.y, design.ts, phi);
  // Per-slot gradient of the data term at Phi(t_s).
  std::vector<Vec> slot_grad(design.ts.size(), Vec::Zero(g.x.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t s = design.slot[i];
    slot_grad[s] -= 2.0 * samples[i].weight * M.log(phi[s], samples[i].q);
  }

  std::vector<Vec> plus;
  std::vector<Vec> minus;

  GeodesicGradient out;
  const Mat bx = M.tangent_basis(g.x);
  out.gx = Vec::Zero(g.x.size());
  for (Eigen::Index j = 0; j < bx.cols(); ++j) {
    const Vec e = bx.col(j);
    M.sample_geodesic(M.exp(g.x, h * e), g.y, design.ts, plus);
    M.sample_geodesic(M.exp(g.x, -h * e), g.y, design.ts, minus);
    double c = 0.0;
    for (std::size_t s = 0; s < design.ts.size(); ++s) {
      c += (plus[s] - minus[s]).dot(slot_grad[s]);
    }
    out.gx += (c / (2.0 * h)) * e;
  }
  const Mat by = M.tangent_basis(g.y);
  out.gy = Vec::Zero(g.y.size());
  for (Eigen::Index j = 0; j < by.cols(); ++j) {
    const Vec e = by.col(j);
    M.sample_geodesic(g.x, M.exp(g.y, h * e), design.ts, plus);
    M.sample_geodesic(g.x, M.exp(g.y, -h * e), design.ts, minus);
    double c = 0.0;
    for (std::size_t s = 0; s < design.ts.size(); ++s) {
      c += (plus[s] - minus[s]).dot(slot_grad[s]);
    }
    out.gy += (c / (2.0 * h)) * e;
  }
  return out;
}

// Inverse of the flat-space Hessian 2 sum_i w_i [(1-t)^2, t(1-t); t(1-t), t^2].
Eigen::Matrix2d design_preconditioner(std::span<const Sample> samples) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (const auto& s : samples) {
    const double a = 1.0 - s.t;
    const double b = s.t;
    G(0, 0) += s.weight * a * a;
    G(0, 1) += s.weight * a * b;
    G(1, 1) += s.weight * b * b;
  }
  G(1, 0) = G(0, 1);
  G *= 2.0;
  const double tr = G.trace();
  if (tr <= 0.0) return Eigen::Matrix2d::Identity();
  // Regularize designs whose times all coincide.
  G += 1e-6 * tr * Eigen::Matrix2d::Identity();
  return G.inverse();
}

}  // namespace

double regression_objective(const Manifold& manifold,
                            std::span<const Sample> samples,
                            const GeodesicPoint& g) {
  std::vector<Vec> phi;
  return evaluate(manifold, samples, make_design(samples), g, phi);
}

GeodesicGradient regression_gradient(const Manifold& manifold,
                                     std::span<const Sample> samples,
                                     const GeodesicPoint& g, double fd_step) {
  return assemble_gradient(manifold, samples, make_design(samples), g, fd_step);
}

GeodesicFit fit_geodesic(const Manifold& M, std::span<const Sample> samples,
                         const GeodesicPoint& init,
                         const RegressionOptions& opt) {
  if (samples.empty()) {
    throw Error(ErrorKind::InvalidInput, "fit_geodesic: no samples");
  }
  const Design design = make_design(samples);
  const Eigen::Matrix2d P = design_preconditioner(samples);
  double weight_sum = 0.0;
  for (const auto& s : samples) weight_sum += s.weight;
  const double plain_step = weight_sum > 0.0 ? 1.0 / weight_sum : 1.0;

  GeodesicFit fit;
  fit.endpoints = init;
  std::vector<Vec> phi;
  double f = evaluate(M, samples, design, fit.endpoints, phi);
  fit.objective_history.push_back(f);
  double step_memory = plain_step;
  int stalls = 0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    const GeodesicGradient g =
        assemble_gradient(M, samples, design, fit.endpoints, opt.fd_step);
    fit.gradient_norm = g.norm();
    if (fit.gradient_norm <= opt.gradient_tolerance) {
      fit.converged = true;
      break;
    }

    Vec dx;
    Vec dy;
    double alpha = 1.0;
    bool scaled = false;
    if (opt.precondition) {
      dx = -P(0, 0) * g.gx;
      dy = -P(1, 1) * g.gy;
      if (M.has_transport()) {
        dx -= P(0, 1) * M.transport(fit.endpoints.y, fit.endpoints.x, g.gy);
        dy -= P(1, 0) * M.transport(fit.endpoints.x, fit.endpoints.y, g.gx);
      }
      scaled = dx.dot(g.gx) + dy.dot(g.gy) < 0.0;
    }
    if (!scaled) {
      dx = -g.gx;
      dy = -g.gy;
      alpha = 2.0 * step_memory;
    }
    const double slope = dx.dot(g.gx) + dy.dot(g.gy);

    bool accepted = false;
    for (int b = 0; b < opt.max_backtracks; ++b) {
      GeodesicPoint trial{M.exp(fit.endpoints.x, alpha * dx),
                          M.exp(fit.endpoints.y, alpha * dy)};
      const double ft = evaluate(M, samples, design, trial, phi);
      // Below roundoff the predicted decrease is invisible; then any
      // non-increasing step is taken.
      const bool roundoff = -alpha * slope <= 64.0 * kEps * std::abs(f);
      if (ft <= f + opt.armijo_c * alpha * slope || (roundoff && ft <= f)) {
        fit.endpoints = std::move(trial);
        f = ft;
        accepted = true;
        break;
      }
      alpha *= opt.shrink;
    }
    if (!accepted) break;
    if (f == fit.objective_history.back() && ++stalls >= 5) break;
    if (!scaled) step_memory = alpha;
    fit.iterations = iter + 1;
    fit.objective_history.push_back(f);
  }
  if (!fit.converged && fit.iterations == opt.max_iterations) {
    fit.gradient_norm =
        assemble_gradient(M, samples, design, fit.endpoints, opt.fd_step).norm();
    fit.converged = fit.gradient_norm <= opt.gradient_tolerance;
  }
  fit.f_min = f;
  return fit;
}

void validate_trajectory(const Trajectory& tr) {
  if (tr.times.size() < 2) {
    throw Error(ErrorKind::InvalidInput,
                "trajectory '" + tr.subject_id + "': needs >= 2 observations");
  }
  if (tr.times.size() != tr.observations.size()) {
    throw Error(ErrorKind::InvalidInput,
                "trajectory '" + tr.subject_id + "': times/observations mismatch");
  }
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    if (!(tr.times[i] > tr.times[i - 1])) {
      throw Error(ErrorKind::InvalidInput,
                  "trajectory '" + tr.subject_id + "': times not increasing");
    }
  }
}

std::vector<double> normalize_times(std::span<const double> times) {
  if (times.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "normalize_times: need >= 2 times");
  }
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "normalize_times: all times equal");
  }
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back((t - *lo) / span);
  return out;
}

FrechetMean frechet_mean(const Manifold& M, std::span<const Vec> points,
                         std::span<const double> weights,
                         const FrechetOptions& opt) {
  if (points.empty()) {
    throw Error(ErrorKind::InvalidInput, "frechet_mean: no points");
  }
  if (!weights.empty() && weights.size() != points.size()) {
    throw Error(ErrorKind::InvalidInput, "frechet_mean: weight count mismatch");
  }
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double wsum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) wsum += w(i);
  if (!(wsum > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "frechet_mean: weights sum to zero");
  }

  FrechetMean out;
  const double radius = 0.5 * M.injectivity_radius();
  if (max_pairwise_distance(M, points) >= radius) {
    out.warnings.push_back("points spread beyond half the injectivity radius");
  }
  out.mean = points[0];
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    Vec step = Vec::Zero(out.mean.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      step += w(i) * M.log(out.mean, points[i]);
    }
    step /= wsum;
    out.iterations = iter + 1;
    if (step.norm() <= opt.step_tolerance) {
      out.converged = true;
      break;
    }
    out.mean = M.exp(out.mean, step);
  }
  out.g_min = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.g_min += w(i) * M.squared_distance(points[i], out.mean);
  }
  return out;
}

double r_squared(double f_min, double g_min) {
  if (!(g_min > 0.0)) {
    throw Error(ErrorKind::UndefinedVariance, "r_squared: zero total variance");
  }
  return std::clamp(1.0 - f_min / g_min, 0.0, 1.0);
}

FittedGeodesic geodesic_regression(const Manifold& M, const Trajectory& tr,
                                   std::span<const double> weights,
                                   const RegressionOptions& opt) {
  validate_trajectory(tr);
  if (!weights.empty() && weights.size() != tr.times.size()) {
    throw Error(ErrorKind::InvalidInput, "geodesic_regression: weight count");
  }
  const std::vector<double> ts = normalize_times(tr.times);
  std::vector<Sample> samples;
  samples.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    samples.push_back({ts[i], tr.observations[i], weights.empty() ? 1.0 : weights[i]});
  }

  FittedGeodesic out;
  out.subject_id = tr.subject_id;
  out.group = tr.group;
  const GeodesicFit fit =
      fit_geodesic(M, samples, {tr.observations.front(), tr.observations.back()}, opt);
  out.endpoints = fit.endpoints;
  out.f_min = fit.f_min;
  out.iterations = fit.iterations;
  out.converged = fit.converged;
  out.gradient_norm = fit.gradient_norm;
  if (!fit.converged) out.warnings.push_back("regression did not converge");

  const FrechetMean mean = frechet_mean(M, tr.observations, weights);
  out.warnings.insert(out.warnings.end(), mean.warnings.begin(), mean.warnings.end());
  out.g_min = mean.g_min;
  if (out.g_min > 0.0) {
    out.r_squared = r_squared(out.f_min, out.g_min);
  } else {
    out.r_squared = std::numeric_limits<double>::quiet_NaN();
    out.warnings.push_back("zero total variance; R^2 undefined");
  }
  return out;
}

PooledRSquared pooled_r_squared(std::span<const FittedGeodesic> fits) {
  PooledRSquared out;
  for (const auto& f : fits) {
    out.f_sum += f.f_min;
    out.g_sum += f.g_min;
  }
  out.r_squared = r_squared(out.f_sum, out.g_sum);
  return out;
}

TangentPCA tangent_pca(const Manifold& M, std::span<const Vec> points,
                       int n_components) {
  if (points.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "tangent_pca: needs >= 2 points");
  }
  if (n_components < 1) {
    throw Error(ErrorKind::InvalidInput, "tangent_pca: components < 1");
  }
  TangentPCA out;
  const FrechetMean mean = frechet_mean(M, points);
  out.warnings = mean.warnings;
  out.mean = mean.mean;
  out.basis = M.tangent_basis(out.mean);

  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Mat coords(n, out.basis.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    coords.row(i) = (out.basis.transpose() * M.log(out.mean, points[i])).transpose();
  }
  const Mat cov = coords.transpose() * coords / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
  out.eigenvalues = eig.eigenvalues().reverse();
  const Mat vectors = eig.eigenvectors().rowwise().reverse();

  const double top = std::max(out.eigenvalues(0), 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues(i) > 1e-12 * top && out.eigenvalues(i) > 0.0) ++rank;
  }
  int c = n_components;
  if (c > rank) {
    out.warnings.push_back("requested components exceed covariance rank; truncated to " +
                           std::to_string(std::max(rank, 1)));
    c = std::max(rank, 1);
  }
  out.directions = out.basis * vectors.leftCols(c);
  out.scores = coords * vectors.leftCols(c);
  return out;
}

Mat tangent_pca_scores(const Manifold& M, const TangentPCA& pca,
                       std::span<const Vec> points) {
  Mat scores(static_cast<Eigen::Index>(points.size()), pca.directions.cols());
  for (std::size_t i = 0; i < points.size(); ++i) {
    scores.row(static_cast<Eigen::Index>(i)) =
        (pca.directions.transpose() * M.log(pca.mean, points[i])).transpose();
  }
  return scores;
}

double max_pairwise_distance(const Manifold& M, std::span<const Vec> points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, M.distance(points[i], points[j]));
    }
  }
  return best;
}

}  // namespace geotrend
