#include <cmath>

#include "geotrend/sasaki.hpp"
#include "test_support.hpp"

namespace geotrend {
namespace {

using test::Rng;

// Ambient RK4 reference on the unit sphere in R^3. State (p, v, u, w):
//   p' = v
//   v' = -|v|^2 p - (<w,v> u - <u,v> w)
//   u' = w - <u,v> p
//   w' = -<w,v> p
TangentBundlePoint sphere_reference(const TangentBundlePoint& base,
                                    const TangentBundleVector& vec, int steps) {
  using State = Eigen::Matrix<double, 12, 1>;
  auto rhs = [](const State& s) {
    const Eigen::Vector3d p = s.segment<3>(0), v = s.segment<3>(3),
                          u = s.segment<3>(6), w = s.segment<3>(9);
    State d;
    d.segment<3>(0) = v;
    d.segment<3>(3) = -v.squaredNorm() * p - (w.dot(v) * u - u.dot(v) * w);
    d.segment<3>(6) = w - u.dot(v) * p;
    d.segment<3>(9) = -w.dot(v) * p;
    return d;
  };
  State s;
  s << base.p, vec.v, base.u, vec.w;
  const double h = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    const State k1 = rhs(s);
    const State k2 = rhs(s + 0.5 * h * k1);
    const State k3 = rhs(s + 0.5 * h * k2);
    const State k4 = rhs(s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return {s.segment<3>(0), s.segment<3>(6)};
}

double bundle_gap(const TangentBundlePoint& a, const TangentBundlePoint& b) {
  return std::sqrt((a.p - b.p).squaredNorm() + (a.u - b.u).squaredNorm());
}

TangentBundlePoint random_sphere_point(Rng& rng, const Sphere& S, double scale) {
  const Vec p = rng.unit(3);
  return {p, rng.tangent(S, p, scale)};
}

TangentBundlePoint random_kendall_point(Rng& rng, const Kendall& K, double scale) {
  const Vec p = test::flat(rng.preshape(2, K.k()));
  return {p, rng.tangent(K, p).normalized() * scale};
}

TangentBundleVector random_vec(Rng& rng, const Manifold& M, const Vec& p,
                               double norm) {
  Vec v = rng.tangent(M, p), w = rng.tangent(M, p);
  const double scale = norm / std::sqrt(v.squaredNorm() + w.squaredNorm());
  return {scale * v, scale * w};
}

TEST(SasakiExp, HorizontalVectorFollowsBaseGeodesic) {
  Rng rng(1);
  Sphere S(2);
  Kendall K(2, 5);
  for (const Manifold* M : {static_cast<const Manifold*>(&S),
                            static_cast<const Manifold*>(&K)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const TangentBundlePoint b =
          M == &S ? random_sphere_point(rng, S, 0.4) : random_kendall_point(rng, K, 0.4);
      const Vec v = rng.tangent(*M, b.p).normalized() * 0.8;
      const TangentBundleVector vec{v, Vec::Zero(v.size())};
      const TangentBundlePoint end = sasaki_exp(*M, b, vec);
      const Vec p1 = M->exp(b.p, v);
      EXPECT_LT((end.p - p1).norm(), 1e-12);
      EXPECT_LT((end.u - M->transport(b.p, p1, b.u)).norm(), 1e-11);
    }
  }
}

TEST(SasakiExp, VerticalVectorTranslatesFiber) {
  Rng rng(2);
  Sphere S(2);
  const TangentBundlePoint b = random_sphere_point(rng, S, 0.3);
  const Vec w = rng.tangent(S, b.p, 0.5);
  const TangentBundlePoint end = sasaki_exp(S, b, {Vec::Zero(3), w});
  EXPECT_EQ(end.p, b.p);
  EXPECT_LT((end.u - (b.u + w)).norm(), 1e-13);
}

TEST(SasakiExp, FlatSpaceIsLinear) {
  Rng rng(3);
  Euclidean E(3);
  const TangentBundlePoint b{rng.gaussian(3), rng.gaussian(3)};
  const TangentBundleVector vec{rng.gaussian(3), rng.gaussian(3)};
  const TangentBundlePoint end = sasaki_exp(E, b, vec, 7);
  EXPECT_LT((end.p - (b.p + vec.v)).norm(), 1e-14);
  EXPECT_LT((end.u - (b.u + vec.w)).norm(), 1e-14);
}

TEST(SasakiExp, MatchesAmbientReferenceWithSecondOrder) {
  Rng rng(4);
  Sphere S(2);
  for (int trial = 0; trial < 10; ++trial) {
    const TangentBundlePoint b = random_sphere_point(rng, S, 0.7);
    const TangentBundleVector vec = random_vec(rng, S, b.p, 1.0);
    const TangentBundlePoint ref = sphere_reference(b, vec, 20000);
    const double e100 = bundle_gap(sasaki_exp(S, b, vec, 100), ref);
    const double e200 = bundle_gap(sasaki_exp(S, b, vec, 200), ref);
    EXPECT_LT(e100, 1e-3);
    EXPECT_GT(e100 / e200, 3.5);
    EXPECT_LT(e100 / e200, 4.5);
  }
}

TEST(SasakiExp, EnergyConserved) {
  Rng rng(5);
  Sphere S(2);
  Kendall K(2, 6);
  for (const Manifold* M : {static_cast<const Manifold*>(&S),
                            static_cast<const Manifold*>(&K)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const TangentBundlePoint b =
          M == &S ? random_sphere_point(rng, S, 0.8) : random_kendall_point(rng, K, 0.8);
      const TangentBundleVector vec = random_vec(rng, *M, b.p, 1.2);
      const auto states = sasaki_integrate(*M, b, vec, 100);
      ASSERT_EQ(states.size(), 101u);
      const double e0 = vec.squared_norm();
      for (const auto& s : states) {
        EXPECT_LT(std::abs(s.v.squaredNorm() + s.w.squaredNorm() - e0) / e0, 1e-4);
      }
    }
  }
}

TEST(SasakiExp, CapabilityAndInputErrors) {
  Kendall K3(3, 4);
  Rng rng(6);
  const Vec p = test::flat(rng.preshape(3, 4));
  try {
    sasaki_exp(K3, {p, Vec::Zero(12)}, {Vec::Zero(12), Vec::Zero(12)});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::Capability);
  }
  Sphere S(2);
  EXPECT_THROW(sasaki_exp(S, {Vec::Unit(3, 0), Vec::Zero(3)},
                          {Vec::Zero(3), Vec::Zero(3)}, 0),
               Error);
}

TEST(SasakiLog, RoundTripSphere) {
  Rng rng(7);
  Sphere S(2);
  for (int trial = 0; trial < 20; ++trial) {
    const TangentBundlePoint b = random_sphere_point(rng, S, 0.5);
    const TangentBundleVector vec = random_vec(rng, S, b.p, rng.uniform(0.05, 0.5));
    const TangentBundlePoint target = sasaki_exp(S, b, vec);
    const SasakiLog log = sasaki_log(S, b, target);
    EXPECT_LT(std::sqrt((log.vec.v - vec.v).squaredNorm() +
                        (log.vec.w - vec.w).squaredNorm()),
              1e-6);
    EXPECT_LT(bundle_residual(S, sasaki_exp(S, b, log.vec), target).norm(), 1e-8);
  }
}

TEST(SasakiLog, RoundTripKendall) {
  Rng rng(8);
  Kendall K(2, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const TangentBundlePoint b = random_kendall_point(rng, K, 0.3);
    const TangentBundleVector vec = random_vec(rng, K, b.p, 0.4);
    const TangentBundlePoint target = sasaki_exp(K, b, vec);
    const SasakiLog log = sasaki_log(K, b, target);
    EXPECT_LT(std::sqrt((log.vec.v - vec.v).squaredNorm() +
                        (log.vec.w - vec.w).squaredNorm()),
              1e-6);
  }
}

TEST(SasakiLog, ZeroAndRotatedRepresentative) {
  Rng rng(9);
  Kendall K(2, 5);
  const TangentBundlePoint b = random_kendall_point(rng, K, 0.3);
  const SasakiLog same = sasaki_log(K, b, b);
  EXPECT_LT(same.vec.squared_norm(), 1e-20);
  // A rotated copy of the same bundle point is the same point of T(shape space).
  const Mat R = rng.rotation(2);
  const TangentBundlePoint rotated{
      Kendall::as_vector(R * K.as_matrix(b.p)),
      Kendall::as_vector(R * K.as_matrix(b.u))};
  EXPECT_LT(sasaki_log(K, b, rotated).vec.squared_norm(), 1e-18);
}

TEST(SasakiLog, NonConvergenceReportsResidual) {
  Sphere S(2);
  SasakiOptions opts;
  opts.log_max_iterations = 0;
  const TangentBundlePoint a{Vec::Unit(3, 0), 0.5 * Vec::Unit(3, 1)};
  const TangentBundlePoint b{Vec::Unit(3, 1), 0.5 * Vec::Unit(3, 2)};
  try {
    sasaki_log(S, a, b, opts);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NonConvergence);
    EXPECT_NE(std::string(err.what()).find("residual"), std::string::npos);
  }
}

TEST(SasakiMean, TwoPointsGiveMidpoint) {
  Rng rng(10);
  Sphere S(2);
  const TangentBundlePoint a = random_sphere_point(rng, S, 0.4);
  const TangentBundleVector vec = random_vec(rng, S, a.p, 0.6);
  const TangentBundlePoint b = sasaki_exp(S, a, vec);
  const SasakiMean mean = sasaki_mean(S, {a, b});
  ASSERT_TRUE(mean.converged);
  const TangentBundlePoint mid = sasaki_exp(S, a, {0.5 * vec.v, 0.5 * vec.w});
  EXPECT_LT(bundle_gap(mean.mean, mid), 1e-6);
}

TEST(SasakiMean, StationarityAndSinglePoint) {
  Rng rng(11);
  Sphere S(2);
  const TangentBundlePoint c = random_sphere_point(rng, S, 0.3);
  std::vector<TangentBundlePoint> pts;
  for (int j = 0; j < 5; ++j) pts.push_back(sasaki_exp(S, c, random_vec(rng, S, c.p, 0.3)));
  SasakiOptions opts;
  opts.threads = 2;
  const SasakiMean mean = sasaki_mean(S, pts, opts);
  ASSERT_TRUE(mean.converged);
  Vec v = Vec::Zero(3), w = Vec::Zero(3);
  for (const auto& p : pts) {
    const SasakiLog l = sasaki_log(S, mean.mean, p);
    v += l.vec.v;
    w += l.vec.w;
  }
  EXPECT_LT(std::sqrt(v.squaredNorm() + w.squaredNorm()) / 5.0, 1e-8);

  const SasakiMean single = sasaki_mean(S, {c});
  EXPECT_EQ(single.iterations, 1);
  EXPECT_LT(bundle_gap(single.mean, c), 1e-15);
  EXPECT_THROW(sasaki_mean(S, {}), Error);
}

TEST(SasakiConversion, RoundTrip) {
  Rng rng(12);
  Sphere S(2);
  const Vec x = rng.unit(3);
  const GeodesicPoint g{x, rng.sphere_near(x, 1.1)};
  const TangentBundlePoint b = to_bundle(S, g);
  EXPECT_EQ(b.p, x);
  EXPECT_NEAR(b.u.norm(), 1.1, 1e-12);
  const GeodesicPoint back = to_geodesic(S, b);
  EXPECT_LT((back.y - g.y).norm(), 1e-12);
}

}  // namespace
}  // namespace geotrend
