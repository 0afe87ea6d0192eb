#include "geotrend/stats.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>

#include "geotrend/parallel.hpp"
#include "geotrend/random.hpp"

namespace geotrend {

namespace {

void require_nonempty(const GroupSample& g, const char* what) {
  if (g.geodesics.empty()) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + ": group '" + g.label + "' is empty");
  }
}

double quadratic_form(const Mat& w, const Vec& v, double rel_tol) {
  return v.dot(psd_pseudo_inverse(w, rel_tol) * v);
}

}  // namespace

Vec pair_coordinates(const Manifold& M, const GeodesicPoint& mean,
                     const Vec& ux, const Vec& uy) {
  const Mat bx = M.tangent_basis(mean.x);
  const Mat by = M.tangent_basis(mean.y);
  Vec c(bx.cols() + by.cols());
  c.head(bx.cols()) = bx.transpose() * ux;
  c.tail(by.cols()) = by.transpose() * uy;
  return c;
}

Mat group_covariance(const Manifold& M, const GroupSample& sample,
                     const GeodesicPoint& mean, const StatsOptions& opt) {
  require_nonempty(sample, "group_covariance");
  const std::size_t N = sample.geodesics.size();
  std::vector<Vec> coords(N);
  parallel_for(N, resolve_threads(opt.threads), [&](std::size_t j) {
    const GeodesicLog l =
        geodesic_log(M, mean, sample.geodesics[j], opt.n, opt.quad, opt.log);
    coords[j] = pair_coordinates(M, mean, l.ux, l.uy);
  });
  const Eigen::Index d = coords.front().size();
  Mat w = Mat::Zero(d, d);
  for (const Vec& c : coords) w.noalias() += c * c.transpose();
  return w / static_cast<double>(N);
}

Mat psd_pseudo_inverse(const Mat& w, double rel_tol) {
  const Mat sym = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const Vec& lambda = eig.eigenvalues();
  const double top = lambda.size() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0;
  Vec inv = Vec::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (top > 0.0 && lambda(i) > rel_tol * top) inv(i) = 1.0 / lambda(i);
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

HotellingResult hotelling(const Manifold& M, const GroupSample& gx,
                          const GroupSample& gy, const StatsOptions& opt) {
  require_nonempty(gx, "hotelling_t2");
  require_nonempty(gy, "hotelling_t2");
  HotellingResult out;
  MeanOptions mopt = opt.mean;
  mopt.threads = opt.threads;
  const MeanGeodesic mx = mean_geodesic(M, gx.geodesics, opt.n, opt.quad, mopt);
  const MeanGeodesic my = mean_geodesic(M, gy.geodesics, opt.n, opt.quad, mopt);
  for (const auto* m : {&mx, &my}) {
    out.warnings.insert(out.warnings.end(), m->warnings.begin(), m->warnings.end());
    if (!m->converged) out.warnings.push_back("group mean did not converge");
  }
  out.mean_x = mx.mean;
  out.mean_y = my.mean;

  const GeodesicLog lx = geodesic_log(M, mx.mean, my.mean, opt.n, opt.quad, opt.log);
  const GeodesicLog ly = geodesic_log(M, my.mean, mx.mean, opt.n, opt.quad, opt.log);
  out.vx = pair_coordinates(M, mx.mean, lx.ux, lx.uy);
  out.vy = pair_coordinates(M, my.mean, ly.ux, ly.uy);
  out.wx = group_covariance(M, gx, mx.mean, opt);
  out.wy = group_covariance(M, gy, my.mean, opt);
  out.t2 = 0.5 * (quadratic_form(out.wx, out.vx, opt.pinv_tolerance) +
                  quadratic_form(out.wy, out.vy, opt.pinv_tolerance));
  out.t2 = std::max(out.t2, 0.0);
  return out;
}

double hotelling_t2(const Manifold& M, const GroupSample& gx,
                    const GroupSample& gy, const StatsOptions& opt) {
  return hotelling(M, gx, gy, opt).t2;
}

TestResult permutation_test(const Manifold& M, const GroupSample& gx,
                            const GroupSample& gy, int permutations,
                            std::uint64_t seed, const StatsOptions& opt) {
  if (permutations < 1) {
    throw Error(ErrorKind::InvalidInput, "permutation_test: B < 1");
  }
  TestResult out;
  const HotellingResult observed = hotelling(M, gx, gy, opt);
  out.t2 = observed.t2;
  out.warnings = observed.warnings;
  out.permutations = permutations;
  out.smoothed = opt.smoothed_p;

  std::vector<GeodesicPoint> pooled = gx.geodesics;
  pooled.insert(pooled.end(), gy.geodesics.begin(), gy.geodesics.end());
  const std::size_t n1 = gx.geodesics.size();

  StatsOptions inner = opt;
  inner.threads = 1;
  out.null_t2.assign(static_cast<std::size_t>(permutations), 0.0);
  parallel_for(out.null_t2.size(), resolve_threads(opt.threads), [&](std::size_t b) {
    Random rng(derive_seed(seed, b));
    std::vector<std::size_t> idx(pooled.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    GroupSample px{gx.label, {}}, py{gy.label, {}};
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n1 ? px : py).geodesics.push_back(pooled[idx[i]]);
    }
    out.null_t2[b] = hotelling(M, px, py, inner).t2;
  });

  std::size_t count = 0;
  for (double t : out.null_t2) count += t >= out.t2 ? 1 : 0;
  out.p_value = opt.smoothed_p
                    ? static_cast<double>(count + 1) / (permutations + 1)
                    : static_cast<double>(count) / permutations;
  return out;
}

}  // namespace geotrend
