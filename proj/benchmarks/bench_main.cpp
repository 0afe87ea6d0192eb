#include <benchmark/benchmark.h>

#include <random>

#include "geotrend/geodesic_space.hpp"
#include "geotrend/kendall.hpp"
#include "geotrend/regression.hpp"
#include "geotrend/sasaki.hpp"
#include "geotrend/sphere.hpp"
#include "geotrend/stats.hpp"
#include "geotrend/synthetic.hpp"

using namespace geotrend;

namespace {

Mat random_preshape(std::mt19937_64& rng, int m, int k) {
  std::normal_distribution<double> normal;
  Mat raw(m, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < m; ++i) raw(i, j) = normal(rng);
  return to_preshape(raw);
}

void BM_SphereExpLog(benchmark::State& state) {
  Sphere S(2);
  const Vec x = Vec::Unit(3, 2);
  const Vec y = Vec::Unit(3, 0) * 0.6 + Vec::Unit(3, 2) * 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(S.exp(x, S.log(x, y)));
}
BENCHMARK(BM_SphereExpLog);

void BM_KendallLog(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int m = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  Kendall K(m, k);
  const Vec x = Kendall::as_vector(random_preshape(rng, m, k));
  const Vec y = Kendall::as_vector(random_preshape(rng, m, k));
  for (auto _ : state) benchmark::DoNotOptimize(K.log(x, y));
}
BENCHMARK(BM_KendallLog)->Args({2, 8})->Args({3, 8})->Args({2, 64});

void BM_Regression(benchmark::State& state) {
  std::mt19937_64 rng(2);
  Kendall K(2, 8);
  const Mat base = random_preshape(rng, 2, 8);
  const Mat dir = horizontal_project(base, random_preshape(rng, 2, 8));
  Trajectory tr;
  tr.subject_id = "s";
  for (int i = 0; i < state.range(0); ++i) {
    const double t = static_cast<double>(i) / (state.range(0) - 1);
    tr.times.push_back(t);
    Mat p = shape_exp(base, 0.3 * t * dir / dir.norm());
    p += 0.01 * random_preshape(rng, 2, 8);
    tr.observations.push_back(Kendall::as_vector(to_preshape(p)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_regression(K, tr));
}
BENCHMARK(BM_Regression)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DeltaSq(benchmark::State& state) {
  Sphere S(2);
  const GeodesicPoint a = default_simulation_mean();
  const GeodesicPoint b{S.exp(a.x, Vec::Unit(3, 1) * 0.2), S.exp(a.y, Vec::Unit(3, 1) * 0.3)};
  const QuadratureRule q = QuadratureRule::trapezoid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(delta_sq(S, a, b, q));
}
BENCHMARK(BM_DeltaSq)->Arg(5)->Arg(17)->Arg(65);

void BM_ShortestPath(benchmark::State& state) {
  Sphere S(2);
  const GeodesicPoint a = default_simulation_mean();
  const GeodesicPoint b{S.exp(a.x, Vec::Unit(3, 1) * 0.5), S.exp(a.y, Vec::Unit(3, 1) * 0.7)};
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(discrete_shortest_path(S, a, b, n, default_quadrature()));
}
BENCHMARK(BM_ShortestPath)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MeanGeodesic(benchmark::State& state) {
  Sphere S(2);
  SimulationConfig c;
  c.n_geodesics = static_cast<int>(state.range(0));
  const auto geos = draw_geodesics(S, c, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(mean_geodesic(S, geos, 2, QuadratureRule::trapezoid(5)));
}
BENCHMARK(BM_MeanGeodesic)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_SasakiMean(benchmark::State& state) {
  Sphere S(2);
  SimulationConfig c;
  c.n_geodesics = static_cast<int>(state.range(0));
  std::vector<TangentBundlePoint> pts;
  for (const auto& g : draw_geodesics(S, c, 7)) pts.push_back(to_bundle(S, g));
  for (auto _ : state) benchmark::DoNotOptimize(sasaki_mean(S, pts));
}
BENCHMARK(BM_SasakiMean)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_Hotelling(benchmark::State& state) {
  Sphere S(2);
  SimulationConfig c;
  c.n_geodesics = 10;
  const GroupSample gx{"x", draw_geodesics(S, c, 1)};
  const GroupSample gy{"y", draw_geodesics(S, c, 2)};
  StatsOptions o;
  o.n = 2;
  o.quad = QuadratureRule::trapezoid(5);
  for (auto _ : state) benchmark::DoNotOptimize(hotelling_t2(S, gx, gy, o));
}
BENCHMARK(BM_Hotelling)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
