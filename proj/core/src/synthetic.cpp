#include "geotrend/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geotrend/parallel.hpp"
#include "geotrend/sphere.hpp"

namespace geotrend {

const char* to_string(Distribution d) {
  return d == Distribution::M2 ? "m2" : "sasaki";
}

const char* to_string(Metric m) { return m == Metric::L2 ? "l2" : "sasaki"; }

Distribution parse_distribution(const std::string& s) {
  if (s == "m2" || s == "M2") return Distribution::M2;
  if (s == "sasaki") return Distribution::Sasaki;
  throw Error(ErrorKind::InvalidInput, "unknown distribution '" + s + "'");
}

Metric parse_metric(const std::string& s) {
  if (s == "l2" || s == "L2") return Metric::L2;
  if (s == "sasaki") return Metric::Sasaki;
  throw Error(ErrorKind::InvalidInput, "unknown metric '" + s + "'");
}

void SimulationConfig::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidInput, "sigma must be > 0");
  if (n_geodesics < 1 || n_repetitions < 1) {
    throw Error(ErrorKind::InvalidInput, "counts must be >= 1");
  }
  if (n < 1) throw Error(ErrorKind::InvalidInput, "n must be >= 1");
}

GeodesicPoint default_simulation_mean() {
  const double a = std::numbers::pi / 4.0;
  Vec x(3), y(3);
  x << 0.0, 0.0, 1.0;
  y << std::sin(a), 0.0, std::cos(a);
  return {x, y};
}

GeodesicPoint sample_m2(const Manifold& S, const GeodesicPoint& mu,
                        double sigma, Random& rng) {
  const Vec g0 = sample_tangent_gaussian(S, mu.x, sigma, rng);
  const Vec g1 = sample_tangent_gaussian(S, mu.y, sigma, rng);
  return {S.exp(mu.x, g0), S.exp(mu.y, g1)};
}

GeodesicPoint sample_sasaki_dist(const Manifold& S, const GeodesicPoint& mu,
                                 double sigma, Random& rng, int steps) {
  const Vec v = sample_tangent_gaussian(S, mu.x, sigma, rng);
  const Vec w = sample_tangent_gaussian(S, mu.x, sigma, rng);
  const TangentBundlePoint end = sasaki_exp(S, to_bundle(S, mu), {v, w}, steps);
  return to_geodesic(S, end);
}

double error_metric(const Manifold& S, const GeodesicPoint& mu,
                    const GeodesicPoint& gamma) {
  return std::max(S.distance(mu.x, gamma.x), S.distance(mu.y, gamma.y)) /
         std::numbers::pi;
}

GeodesicPoint estimate_mean(const Manifold& M,
                            const std::vector<GeodesicPoint>& geodesics,
                            const SimulationConfig& config,
                            std::vector<std::string>* warnings) {
  auto note = [&](const std::vector<std::string>& w) {
    if (warnings) warnings->insert(warnings->end(), w.begin(), w.end());
  };
  if (config.metric == Metric::L2) {
    MeanOptions mopt = config.mean;
    mopt.threads = 1;
    const MeanGeodesic m = mean_geodesic(M, geodesics, config.n, config.quad, mopt);
    note(m.warnings);
    if (!m.converged) {
      throw Error(ErrorKind::NonConvergence, "mean geodesic did not converge");
    }
    return m.mean;
  }
  std::vector<TangentBundlePoint> pts;
  pts.reserve(geodesics.size());
  for (const auto& g : geodesics) pts.push_back(to_bundle(M, g));
  SasakiOptions sopt = config.sasaki;
  sopt.threads = 1;
  const SasakiMean m = sasaki_mean(M, pts, sopt);
  note(m.warnings);
  if (!m.converged) {
    throw Error(ErrorKind::NonConvergence, "Sasaki mean did not converge");
  }
  return to_geodesic(M, m.mean);
}

namespace {

std::pair<double, double> bootstrap_mean_interval(const std::vector<double>& x,
                                                  std::uint64_t seed,
                                                  int resamples) {
  Random rng(seed);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[rng.below(x.size())];
    m = sum / static_cast<double>(x.size());
  }
  std::sort(means.begin(), means.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, means.size() - 1);
    return means[lo] + (pos - static_cast<double>(lo)) * (means[hi] - means[lo]);
  };
  return {quantile(0.025), quantile(0.975)};
}

}  // namespace

ErrorSummary summarize_errors(const std::vector<double>& errors,
                              std::uint64_t seed, int resamples) {
  ErrorSummary s;
  s.count = errors.size();
  if (errors.empty()) return s;
  const double n = static_cast<double>(errors.size());
  s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : errors) ss += (e - s.mean) * (e - s.mean);
  s.stdev = errors.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);

  if (resamples > 0) {
    const auto [lo, hi] = bootstrap_mean_interval(errors, seed, resamples);
    s.ci_low = lo;
    s.ci_high = hi;
  }

  const double var = ss / n;
  if (var > 0.0 && s.mean > 0.0 && s.mean < 1.0) {
    const double common = s.mean * (1.0 - s.mean) / var - 1.0;
    if (common > 0.0) {
      s.beta_a = s.mean * common;
      s.beta_b = (1.0 - s.mean) * common;
    }
  }
  return s;
}

std::vector<GeodesicPoint> draw_geodesics(const Manifold& S,
                                          const SimulationConfig& config,
                                          std::uint64_t stream_seed) {
  const GeodesicPoint mu =
      config.mu.x.size() ? config.mu : default_simulation_mean();
  Random rng(stream_seed);
  std::vector<GeodesicPoint> out;
  out.reserve(static_cast<std::size_t>(config.n_geodesics));
  for (int j = 0; j < config.n_geodesics; ++j) {
    out.push_back(config.distribution == Distribution::M2
                      ? sample_m2(S, mu, config.sigma, rng)
                      : sample_sasaki_dist(S, mu, config.sigma, rng,
                                           config.sasaki.steps));
  }
  return out;
}

namespace {

std::vector<Repetition> run_repetitions(const SimulationConfig& config,
                                        std::uint64_t seed) {
  const Sphere S(2);
  const GeodesicPoint mu =
      config.mu.x.size() ? config.mu : default_simulation_mean();
  std::vector<Repetition> reps(static_cast<std::size_t>(config.n_repetitions));
  parallel_for(reps.size(), resolve_threads(config.threads), [&](std::size_t r) {
    Repetition& rep = reps[r];
    try {
      const auto sample = draw_geodesics(S, config, derive_seed(seed, r));
      rep.estimate = estimate_mean(S, sample, config);
      rep.error = error_metric(S, mu, rep.estimate);
    } catch (const Error& err) {
      rep.ok = false;
      rep.failure = err.what();
    }
  });
  return reps;
}

}  // namespace

RepeatedStudy study_repeated(const SimulationConfig& config) {
  config.validate();
  RepeatedStudy out;
  out.config = config;
  out.repetitions = run_repetitions(config, config.seed);
  std::vector<double> errors;
  for (const auto& r : out.repetitions) {
    if (r.ok) errors.push_back(r.error);
    else ++out.failures;
  }
  out.summary = summarize_errors(errors, derive_seed(config.seed, ~0ULL));
  return out;
}

IncreasingStudy study_increasing(const SimulationConfig& config,
                                 const std::vector<int>& n_list) {
  config.validate();
  IncreasingStudy out;
  for (int N : n_list) {
    SimulationConfig c = config;
    c.n_geodesics = N;
    c.validate();
    IncreasingRow row;
    row.n_geodesics = N;
    const auto reps =
        run_repetitions(c, derive_seed(config.seed, 0x100000000ULL + N));
    for (const auto& r : reps) {
      if (r.ok) row.errors.push_back(r.error);
      else ++row.failures;
    }
    const ErrorSummary s = summarize_errors(row.errors, 0, 0);
    row.mean = s.mean;
    row.stdev = s.stdev;
    out.rows.push_back(std::move(row));
  }
  double mx = 0.0, my = 0.0;
  for (const auto& r : out.rows) {
    mx += r.n_geodesics;
    my += r.mean;
  }
  const double k = static_cast<double>(out.rows.size());
  if (k >= 2) {
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& r : out.rows) {
      sxy += (r.n_geodesics - mx) * (r.mean - my);
      sxx += (r.n_geodesics - mx) * (r.n_geodesics - mx);
    }
    out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return out;
}

}  // namespace geotrend
