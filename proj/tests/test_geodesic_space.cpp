#include <cmath>
#include <numbers>

#include "geotrend/geodesic_space.hpp"
#include "test_support.hpp"

namespace geotrend {
namespace {

using test::flat;
using test::Rng;

Mat rot_z(double a) {
  Mat r = Mat::Identity(3, 3);
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return r;
}

Vec equator(double lon) { return Vec{{std::cos(lon), std::sin(lon), 0.0}}; }

GeodesicPoint random_geodesic(Rng& rng, const Vec& centre, double spread, double length) {
  const Vec x = rng.sphere_near(centre, spread);
  return {x, rng.sphere_near(x, length)};
}

GeodesicPoint perturb(Rng& rng, const GeodesicPoint& g, double r) {
  return {rng.sphere_near(g.x, r), rng.sphere_near(g.y, r)};
}

double node_distance(const Manifold& M, const GeodesicPoint& a, const GeodesicPoint& b) {
  return std::max(M.distance(a.x, b.x), M.distance(a.y, b.y));
}

// Independent E_2 minimizer: plain Riemannian descent on the middle node
// with finite-difference gradients of the energy itself.
double direct_min_energy(const Sphere& S, const GeodesicPoint& a, const GeodesicPoint& b,
                         const QuadratureRule& q) {
  GeodesicPoint h{slerp(a.x, b.x, 0.5), slerp(a.y, b.y, 0.5)};
  auto energy = [&](const GeodesicPoint& m) {
    return discrete_energy(S, DiscretePath{{a, m, b}}, q);
  };
  double step = 0.1;
  double e = energy(h);
  for (int it = 0; it < 4000; ++it) {
    const Vec gx = riemannian_gradient_fd(
        S, [&](const Vec& p) { return energy({p, h.y}); }, h.x, 1e-6);
    const Vec gy = riemannian_gradient_fd(
        S, [&](const Vec& p) { return energy({h.x, p}); }, h.y, 1e-6);
    const double g2 = gx.squaredNorm() + gy.squaredNorm();
    if (g2 < 1e-22) break;
    step *= 2.0;
    for (int b2 = 0; b2 < 60; ++b2) {
      GeodesicPoint trial{sphere_exp(h.x, -step * gx), sphere_exp(h.y, -step * gy)};
      const double et = energy(trial);
      if (et <= e - 1e-4 * step * g2) {
        h = trial;
        e = et;
        break;
      }
      step *= 0.5;
    }
  }
  return e;
}

TEST(Quadrature, WeightsAndExactness) {
  for (const auto& q : {QuadratureRule::trapezoid(17), QuadratureRule::gauss_legendre(5),
                        QuadratureRule::parse("gauss:9"), QuadratureRule::parse("trapezoid:2")}) {
    double s = 0.0;
    for (double w : q.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(q.nodes.begin(), q.nodes.end()));
    EXPECT_GE(q.nodes.front(), 0.0);
    EXPECT_LE(q.nodes.back(), 1.0);
  }
  const auto g = QuadratureRule::gauss_legendre(5);
  double m9 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m9 += g.weights[i] * std::pow(g.nodes[i], 9);
  EXPECT_NEAR(m9, 0.1, 1e-14);
  EXPECT_EQ(default_quadrature().describe(), "trapezoid:17");
  EXPECT_THROW(QuadratureRule::parse("simpson:5"), Error);
  EXPECT_THROW(QuadratureRule::parse("gauss:x"), Error);
  EXPECT_THROW(QuadratureRule::parse("trapezoid:1"), Error);
}

TEST(DeltaSq, Examples) {
  Sphere S(2);
  const auto q = default_quadrature();
  Rng rng(51);
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.8);
  EXPECT_EQ(delta_sq(S, a, a, q), 0.0);

  // Rotating an equatorial arc about the pole moves every point by theta.
  const double theta = 0.37;
  const GeodesicPoint eq{equator(0.1), equator(1.2)};
  const GeodesicPoint rotated{rot_z(theta) * eq.x, rot_z(theta) * eq.y};
  EXPECT_NEAR(delta_sq(S, eq, rotated, q), theta * theta, 1e-10);
  EXPECT_NEAR(delta_sq(S, eq, rotated, QuadratureRule::gauss_legendre(5)), theta * theta,
              1e-10);

  Euclidean E(1);
  const GeodesicPoint f1{Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)};
  const GeodesicPoint f2{Vec::Constant(1, 1.0), Vec::Constant(1, 2.0)};
  EXPECT_DOUBLE_EQ(delta_sq(E, f1, f2, q), 1.0);
}

TEST(DeltaSq, ExactSymmetry) {
  Rng rng(52);
  Sphere S(2);
  Kendall K(2, 5);
  const auto q = default_quadrature();
  for (int trial = 0; trial < 100; ++trial) {
    const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.7);
    const GeodesicPoint b = perturb(rng, a, 0.4);
    EXPECT_EQ(delta_sq(S, a, b, q), delta_sq(S, b, a, q));
    const Mat x0 = rng.preshape(2, 5);
    const GeodesicPoint ka{flat(x0), flat(rng.preshape_near(x0, 0.3))};
    const GeodesicPoint kb{flat(rng.rotation(2) * rng.preshape_near(x0, 0.2)),
                           flat(rng.preshape_near(x0, 0.4))};
    EXPECT_EQ(delta_sq(K, ka, kb, q), delta_sq(K, kb, ka, q));
  }
}

TEST(DeltaSq, TrapezoidRefinementIsSecondOrder) {
  Rng rng(53);
  Sphere S(2);
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 1.0);
  const GeodesicPoint b{rng.sphere_near(a.x, 0.5), rng.sphere_near(a.y, 0.2)};
  const double d9 = delta_sq(S, a, b, QuadratureRule::trapezoid(9));
  const double d17 = delta_sq(S, a, b, QuadratureRule::trapezoid(17));
  const double d33 = delta_sq(S, a, b, QuadratureRule::trapezoid(33));
  const double ref = delta_sq(S, a, b, QuadratureRule::gauss_legendre(20));
  EXPECT_NEAR(std::abs(d9 - ref) / std::abs(d17 - ref), 4.0, 0.3);
  EXPECT_NEAR(std::abs(d17 - ref) / std::abs(d33 - ref), 4.0, 0.3);
}

TEST(Energy, ConstantPathAndInequalities) {
  Rng rng(54);
  Sphere S(2);
  const auto q = default_quadrature();
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.6);
  DiscretePath constant{{a, a, a, a}};
  EXPECT_EQ(discrete_energy(S, constant, q), 0.0);
  EXPECT_EQ(discrete_length(S, constant, q), 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    DiscretePath p;
    p.nodes.push_back(random_geodesic(rng, rng.unit(3), 0.0, 0.6));
    const int n = 1 + trial % 5;
    for (int i = 0; i < n; ++i) p.nodes.push_back(perturb(rng, p.nodes.back(), 0.3));
    const double E = discrete_energy(S, p, q);
    const double L = discrete_length(S, p, q);
    EXPECT_GE(E, L * L * (1 - 1e-12));
    EXPECT_LE(delta_sq(S, p.nodes.front(), p.nodes.back(), q), E * (1 + 1e-12));
  }
  DiscretePath single{{a, perturb(rng, a, 0.2)}};
  EXPECT_DOUBLE_EQ(discrete_length(S, single, q),
                   std::sqrt(delta_sq(S, single.nodes[0], single.nodes[1], q)));
}

TEST(Length, RefinementConsistency) {
  Sphere S(2);
  const auto q = default_quadrature();
  const GeodesicPoint eq{equator(0.0), equator(0.9)};
  auto at = [&](double s) {
    return GeodesicPoint{rot_z(0.6 * s) * eq.x, rot_z(0.6 * s) * eq.y};
  };
  DiscretePath fine{{at(0), at(0.25), at(0.5), at(0.75), at(1.0)}};
  DiscretePath coarse{{at(0), at(0.5), at(1.0)}};
  EXPECT_NEAR(discrete_length(S, fine, q), discrete_length(S, coarse, q), 1e-6);
  EXPECT_NEAR(discrete_length(S, fine, q), 0.6, 1e-10);
}

TEST(ShortestPath, ConstantForEqualEndpoints) {
  Rng rng(55);
  Sphere S(2);
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.5);
  const ShortestPath sp = discrete_shortest_path(S, a, a, 3, default_quadrature());
  EXPECT_EQ(sp.energy, 0.0);
  EXPECT_TRUE(sp.converged);
  for (const auto& node : sp.path.nodes) EXPECT_LT(node_distance(S, node, a), 1e-14);
}

TEST(ShortestPath, EuclideanKeepsLinearInitialization) {
  Rng rng(56);
  Euclidean E(2);
  const auto q = default_quadrature();
  const GeodesicPoint a{rng.gaussian(2), rng.gaussian(2)};
  const GeodesicPoint b{rng.gaussian(2), rng.gaussian(2)};
  const int n = 4;
  const ShortestPath sp = discrete_shortest_path(E, a, b, n, q);
  const DiscretePath lin = linear_path(E, a, b, n);
  for (int i = 0; i <= n; ++i) EXPECT_LT(node_distance(E, sp.path.nodes[i], lin.nodes[i]), 1e-9);
  EXPECT_NEAR(delta_sq(E, a, b, q), sp.energy, 1e-12);
}

TEST(ShortestPath, SphereMatchesDirectOptimization) {
  Rng rng(57);
  Sphere S(2);
  const auto q = default_quadrature();
  for (int trial = 0; trial < 3; ++trial) {
    const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.7);
    const GeodesicPoint b = perturb(rng, a, 0.6);
    const ShortestPath sp = discrete_shortest_path(S, a, b, 2, q);
    EXPECT_TRUE(sp.converged);
    EXPECT_LE(sp.energy, direct_min_energy(S, a, b, q) + 1e-8);
  }
}

TEST(ShortestPath, MonotoneAPrioriAndReversal) {
  Rng rng(58);
  Sphere S(2);
  const auto q = default_quadrature();
  for (int trial = 0; trial < 3; ++trial) {
    const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.8);
    const GeodesicPoint b = perturb(rng, a, 0.7);
    const int n = 4;
    PathOptions tight;
    tight.relative_tolerance = 1e-13;
    const ShortestPath fwd = discrete_shortest_path(S, a, b, n, q, tight);
    ASSERT_TRUE(fwd.converged);
    for (std::size_t i = 1; i < fwd.energy_history.size(); ++i) {
      EXPECT_LE(fwd.energy_history[i], fwd.energy_history[i - 1]);
    }
    EXPECT_LE(delta_sq(S, a, b, q), fwd.energy);
    EXPECT_LT(fwd.energy, fwd.energy_history.front());
    const ShortestPath bwd = discrete_shortest_path(S, b, a, n, q, tight);
    for (int i = 0; i <= n; ++i) {
      EXPECT_LT(node_distance(S, fwd.path.nodes[i], bwd.path.nodes[n - i]), 1e-6);
    }
  }
}

TEST(ShortestPath, WarnsOutsideNeighbourhood) {
  Sphere S(2);
  const GeodesicPoint a{equator(0.0), equator(0.5)};
  const GeodesicPoint b{equator(2.0), equator(2.5)};
  const ShortestPath sp = discrete_shortest_path(S, a, b, 2, default_quadrature());
  EXPECT_FALSE(sp.warnings.empty());
}

TEST(GeodesicLog, ZeroEuclideanAndNearby) {
  Rng rng(59);
  const auto q = default_quadrature();
  Sphere S(2);
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.5);
  const GeodesicLog zero = geodesic_log(S, a, a, 2, q);
  EXPECT_LT(zero.ux.norm() + zero.uy.norm(), 1e-14);

  Euclidean E(3);
  const GeodesicPoint fa{rng.gaussian(3), rng.gaussian(3)};
  const GeodesicPoint fb{rng.gaussian(3), rng.gaussian(3)};
  for (int n : {1, 2, 3}) {
    const GeodesicLog lg = geodesic_log(E, fa, fb, n, q);
    EXPECT_LT((lg.ux - (fb.x - fa.x)).norm(), 1e-9);
    EXPECT_LT((lg.uy - (fb.y - fa.y)).norm(), 1e-9);
  }

  const GeodesicPoint b = perturb(rng, a, 0.05);
  const GeodesicLog lg = geodesic_log(S, a, b, 2, q);
  EXPECT_TRUE(std::isfinite(std::sqrt(lg.ux.squaredNorm() + lg.uy.squaredNorm())));
  const double L = discrete_length(S, lg.path.path, q);
  const double direct = std::sqrt(delta_sq(S, a, b, q));
  EXPECT_LT(std::abs(L - direct), 0.1 * direct);
  EXPECT_NEAR(lg.ux.dot(a.x), 0.0, 1e-12);
}

TEST(MeanGeodesic, IdenticalInputs) {
  Rng rng(60);
  Sphere S(2);
  const GeodesicPoint g = random_geodesic(rng, rng.unit(3), 0.0, 0.6);
  const std::vector<GeodesicPoint> in(4, g);
  const MeanGeodesic m = mean_geodesic(S, in, 2, default_quadrature());
  EXPECT_LT(node_distance(S, m.mean, g), 1e-12);
  EXPECT_EQ(m.g_n, 0.0);
  EXPECT_TRUE(m.converged);
}

TEST(MeanGeodesic, EuclideanArithmeticMean) {
  Rng rng(61);
  Euclidean E(2);
  std::vector<GeodesicPoint> in;
  Vec mx = Vec::Zero(2), my = Vec::Zero(2);
  for (int j = 0; j < 5; ++j) {
    in.push_back({rng.gaussian(2), rng.gaussian(2)});
    mx += in.back().x / 5.0;
    my += in.back().y / 5.0;
  }
  for (int n : {1, 2, 3}) {
    const MeanGeodesic m = mean_geodesic(E, in, n, default_quadrature());
    EXPECT_LT((m.mean.x - mx).norm(), 1e-8);
    EXPECT_LT((m.mean.y - my).norm(), 1e-8);
  }
}

TEST(MeanGeodesic, PointwiseMirrorPairRecoversCentre) {
  // gamma_+(t) = mu(a + b t) and gamma_-(t) = mu(-a + (2 - b) t): at every t the
  // logs from mu(t) to the two inputs are opposite.
  Rng rng(62);
  Sphere S(2);
  const Mat R = rng.rotation(3);
  const double phi = 0.8;
  auto mu = [&](double s) { return Vec(R * equator(phi * s)); };
  const double a = 0.15, b = 0.8;
  const std::vector<GeodesicPoint> in{{mu(a), mu(a + b)}, {mu(-a), mu(-a + 2.0 - b)}};
  for (int n : {1, 2}) {
    const MeanGeodesic m = mean_geodesic(S, in, n, default_quadrature());
    EXPECT_TRUE(m.converged);
    EXPECT_LT(node_distance(S, m.mean, {mu(0.0), mu(1.0)}), 1e-6) << "n=" << n;
  }
}

TEST(MeanGeodesic, IsometricMirrorPairStaysInMirrorPlane) {
  Sphere S(2);
  const double eps = 0.2;
  auto lifted = [](double lon, double lat) {
    return Vec{{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)}};
  };
  const std::vector<GeodesicPoint> in{{lifted(-0.5, eps), lifted(0.5, eps)},
                                      {lifted(-0.5, -eps), lifted(0.5, -eps)}};
  const MeanGeodesic m = mean_geodesic(S, in, 2, default_quadrature());
  EXPECT_NEAR(m.mean.x(2), 0.0, 1e-8);
  EXPECT_NEAR(m.mean.y(2), 0.0, 1e-8);
  // Symmetric about the meridian through (1, 0, 0).
  EXPECT_NEAR(m.mean.x(1), -m.mean.y(1), 1e-8);
}

TEST(MeanGeodesic, MonotoneAndCascadicAgreement) {
  Rng rng(63);
  Sphere S(2);
  const Vec c = rng.unit(3);
  const GeodesicPoint base = random_geodesic(rng, c, 0.0, 0.5);
  std::vector<GeodesicPoint> in;
  for (int j = 0; j < 4; ++j) in.push_back(perturb(rng, base, 0.25));
  const auto q = default_quadrature();
  const MeanGeodesic casc = mean_geodesic(S, in, 3, q);
  EXPECT_TRUE(casc.converged);
  ASSERT_EQ(casc.history.size(), 3u);
  for (const auto& level : casc.history) {
    for (std::size_t i = 1; i < level.size(); ++i) EXPECT_LE(level[i], level[i - 1]);
  }
  MeanOptions direct;
  direct.cascadic = false;
  const MeanGeodesic flat_start = mean_geodesic(S, in, 3, q, direct);
  EXPECT_LT(node_distance(S, casc.mean, flat_start.mean), 1e-5);
  EXPECT_NEAR(casc.g_n, flat_start.g_n, 1e-8);
  double recomputed = 0.0;
  for (const auto& p : casc.paths) recomputed += discrete_energy(S, p, q);
  EXPECT_NEAR(recomputed, casc.g_n, 1e-14);

  MeanOptions threaded;
  threaded.threads = 3;
  const MeanGeodesic par = mean_geodesic(S, in, 3, q, threaded);
  EXPECT_EQ(par.g_n, casc.g_n);
  EXPECT_EQ(par.mean.x, casc.mean.x);
}

TEST(MeanGeodesic, SpreadWarning) {
  Sphere S(2);
  std::vector<GeodesicPoint> in(3, {equator(0.0), equator(0.3)});
  in.push_back({equator(2.2), equator(2.5)});
  const MeanGeodesic m = mean_geodesic(S, in, 1, default_quadrature());
  EXPECT_FALSE(m.warnings.empty());
}

TEST(ResamplePath, KeepsNodesOfSubdivision) {
  Rng rng(64);
  Sphere S(2);
  const GeodesicPoint a = random_geodesic(rng, rng.unit(3), 0.0, 0.5);
  const GeodesicPoint b = perturb(rng, a, 0.4);
  const DiscretePath p2 = linear_path(S, a, b, 2);
  const DiscretePath p4 = resample_path(S, p2, 4);
  ASSERT_EQ(p4.n(), 4);
  EXPECT_LT(node_distance(S, p4.nodes[2], p2.nodes[1]), 1e-15);
  EXPECT_LT(node_distance(S, p4.nodes[1], linear_path(S, a, b, 4).nodes[1]), 1e-12);
}

}  // namespace
}  // namespace geotrend
