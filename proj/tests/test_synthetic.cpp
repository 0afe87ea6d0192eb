#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "geotrend/synthetic.hpp"
#include "test_support.hpp"

namespace geotrend {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Random, SplitmixReferenceValues) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(state), 0x6e789e6aa1b965f4ULL);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(42, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Random, UniformNormalAndBelow) {
  Random rng(7);
  double sum = 0.0, sq = 0.0, usum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    usum += u;
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(usum / n, 0.5, 0.005);
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);

  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_EQ(rng.below(1), 0u);

  std::vector<int> v{0, 1, 2, 3, 4, 5};
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}

TEST(Random, ReproducibleStreams) {
  Random a(123), b(123);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(TangentGaussian, TangencyAndVariance) {
  Sphere S(2);
  Random rng(1);
  test::Rng t(2);
  const Vec x = t.unit(3);
  const Mat B = S.tangent_basis(x);
  const double sigma = 0.3;
  Eigen::Vector2d sq = Eigen::Vector2d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec v = sample_tangent_gaussian(S, x, sigma, rng);
    ASSERT_LT(std::abs(v.dot(x)), 1e-12);
    sq += (B.transpose() * v).cwiseAbs2();
  }
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(sq(k) / n, sigma * sigma, 0.05 * sigma * sigma);
  EXPECT_THROW(sample_tangent_gaussian(S, x, 0.0, rng), Error);
}

TEST(TangentGaussian, SmallSigmaMeanNorm) {
  Sphere S(2);
  Random rng(3);
  const Vec x = Vec::Unit(3, 2);
  const double sigma = 1e-6;
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) total += sample_tangent_gaussian(S, x, sigma, rng).norm();
  EXPECT_LE(total / 10000, 3.0 * sigma * std::sqrt(2.0));
}

TEST(SampleM2, DegenerateAndIndependent) {
  Sphere S(2);
  const GeodesicPoint mu = default_simulation_mean();
  EXPECT_NEAR(S.distance(mu.x, mu.y), kPi / 4, 1e-15);
  Random rng(4);
  const GeodesicPoint g = sample_m2(S, mu, 1e-14, rng);
  EXPECT_LT((g.x - mu.x).norm() + (g.y - mu.y).norm(), 1e-12);

  const int n = 10000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    const GeodesicPoint s = sample_m2(S, mu, kPi / 12, rng);
    a[i] = S.distance(mu.x, s.x);
    b[i] = S.distance(mu.y, s.y);
  }
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  EXPECT_LE(std::abs(sab / std::sqrt(saa * sbb)), 0.05);
}

TEST(SampleSasaki, DegenerateValidityAndPushforward) {
  Sphere S(2);
  const GeodesicPoint mu = default_simulation_mean();
  Random rng(5);
  const GeodesicPoint g = sample_sasaki_dist(S, mu, 1e-14, rng);
  EXPECT_LT((g.x - mu.x).norm() + (g.y - mu.y).norm(), 1e-12);

  const double sigma = kPi / 12;
  const int n = 10000;
  int valid = 0;
  std::vector<double> d0(n);
  for (int i = 0; i < n; ++i) {
    const GeodesicPoint s = sample_sasaki_dist(S, mu, sigma, rng);
    if (S.distance(s.x, s.y) < kPi) ++valid;
    d0[i] = S.distance(mu.x, s.x);
  }
  EXPECT_GE(valid, 9990);
  // |v| of a 2D isotropic Gaussian is Rayleigh(sigma).
  std::sort(d0.begin(), d0.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = 1.0 - std::exp(-d0[i] * d0[i] / (2.0 * sigma * sigma));
    ks = std::max({ks, std::abs(F - static_cast<double>(i) / n),
                   std::abs(static_cast<double>(i + 1) / n - F)});
  }
  EXPECT_LE(ks, 0.05);
}

TEST(ErrorMetric, Bounds) {
  Sphere S(2);
  const GeodesicPoint mu = default_simulation_mean();
  EXPECT_EQ(error_metric(S, mu, mu), 0.0);
  EXPECT_NEAR(error_metric(S, mu, {-mu.x, mu.y}), 1.0, 1e-15);
  Random rng(6);
  const Vec p = S.exp(mu.x, sample_tangent_gaussian(S, mu.x, 0.3, rng));
  const Vec q = S.exp(mu.y, sample_tangent_gaussian(S, mu.y, 0.3, rng));
  const GeodesicPoint moved_x{p, mu.y}, moved_y{mu.x, S.exp(mu.y, S.transport(mu.x, mu.y, S.log(mu.x, p)))};
  EXPECT_NEAR(error_metric(S, mu, moved_x), error_metric(S, mu, moved_y), 1e-12);
  const double e = error_metric(S, mu, {p, q});
  EXPECT_GE(e, 0.0);
  EXPECT_LE(e, 1.0);
}

TEST(Summary, StatisticsAndBeta) {
  const std::vector<double> x{0.01, 0.02, 0.03, 0.04, 0.05};
  const ErrorSummary s = summarize_errors(x, 9);
  EXPECT_NEAR(s.mean, 0.03, 1e-15);
  EXPECT_NEAR(s.median, 0.03, 1e-15);
  EXPECT_NEAR(s.stdev, std::sqrt(0.00025), 1e-15);
  EXPECT_LT(s.ci_low, s.mean);
  EXPECT_GT(s.ci_high, s.mean);
  EXPECT_GE(s.ci_low, 0.01);
  EXPECT_LE(s.ci_high, 0.05);
  // Beta moments reproduce the sample mean and biased variance.
  const double a = s.beta_a, b = s.beta_b;
  EXPECT_NEAR(a / (a + b), 0.03, 1e-12);
  EXPECT_NEAR(a * b / ((a + b) * (a + b) * (a + b + 1)), 0.0002, 1e-12);
  EXPECT_EQ(summarize_errors({}, 1).count, 0u);
  EXPECT_EQ(summarize_errors(x, 9).ci_low, s.ci_low);
}

SimulationConfig small_config() {
  SimulationConfig c;
  c.n_geodesics = 6;
  c.n_repetitions = 3;
  c.n = 2;
  c.quad = QuadratureRule::trapezoid(5);
  c.mean.relative_tolerance = 1e-7;
  c.seed = 77;
  return c;
}

TEST(StudyRepeated, DeterministicAcrossThreads) {
  SimulationConfig c = small_config();
  const RepeatedStudy a = study_repeated(c);
  c.threads = 3;
  const RepeatedStudy b = study_repeated(c);
  ASSERT_EQ(a.repetitions.size(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(a.repetitions[r].error, b.repetitions[r].error);
    EXPECT_TRUE(a.repetitions[r].ok);
  }
  EXPECT_EQ(a.summary.ci_low, b.summary.ci_low);
  EXPECT_EQ(a.failures, 0u);
}

TEST(StudyRepeated, NoiselessLimitBothMetrics) {
  for (Metric m : {Metric::L2, Metric::Sasaki}) {
    for (Distribution d : {Distribution::M2, Distribution::Sasaki}) {
      SimulationConfig c = small_config();
      c.sigma = 1e-6;
      c.metric = m;
      c.distribution = d;
      const RepeatedStudy s = study_repeated(c);
      for (const auto& r : s.repetitions) {
        ASSERT_TRUE(r.ok) << r.failure;
        EXPECT_LE(r.error, 1e-4);
      }
    }
  }
}

TEST(StudyIncreasing, ErrorDecreasesWithN) {
  SimulationConfig c = small_config();
  c.n_repetitions = 6;
  const IncreasingStudy s = study_increasing(c, {4, 16, 48});
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_LT(s.slope, 0.0);
  EXPECT_EQ(s.rows[1].errors.size(), 6u);
}

TEST(Config, ParsingAndValidation) {
  EXPECT_EQ(parse_distribution("m2"), Distribution::M2);
  EXPECT_EQ(parse_metric("sasaki"), Metric::Sasaki);
  EXPECT_THROW(parse_metric("l1"), Error);
  SimulationConfig c;
  c.sigma = -1.0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_STREQ(to_string(Distribution::Sasaki), "sasaki");
}

}  // namespace
}  // namespace geotrend
