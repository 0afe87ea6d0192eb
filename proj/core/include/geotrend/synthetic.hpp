#pragma once

// Random geodesics on S² around a fixed mean geodesic and the simulation
// studies measuring how well mean geodesics are recovered.

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "geotrend/geodesic_space.hpp"
#include "geotrend/random.hpp"
#include "geotrend/sasaki.hpp"

namespace geotrend {

enum class Distribution { M2, Sasaki };
enum class Metric { L2, Sasaki };

const char* to_string(Distribution d);
const char* to_string(Metric m);
/// Accepts "m2" / "sasaki" and "l2" / "sasaki"; throws InvalidInput.
Distribution parse_distribution(const std::string& s);
Metric parse_metric(const std::string& s);

struct SimulationConfig {
  double sigma = std::numbers::pi / 12.0;
  int n_geodesics = 25;
  int n_repetitions = 100;
  Distribution distribution = Distribution::M2;
  Metric metric = Metric::L2;
  std::uint64_t seed = 1;
  /// Segments of the discrete paths for the L2 mean.
  int n = 4;
  QuadratureRule quad = default_quadrature();
  MeanOptions mean;
  SasakiOptions sasaki;
  int threads = 1;
  /// Mean geodesic the samples are drawn around; default_simulation_mean()
  /// when empty.
  GeodesicPoint mu;

  void validate() const;
};

/// mu_0 = (0, 0, 1), mu_1 = (sin(pi/4), 0, cos(pi/4)).
GeodesicPoint default_simulation_mean();

/// Independent tangent Gaussians at both endpoints.
GeodesicPoint sample_m2(const Manifold& sphere, const GeodesicPoint& mu,
                        double sigma, Random& rng);

/// (v, w) tangent Gaussians at mu.x pushed through the Sasaki exponential at
/// (mu.x, log_{mu.x} mu.y), returned in endpoint form.
GeodesicPoint sample_sasaki_dist(const Manifold& sphere, const GeodesicPoint& mu,
                                 double sigma, Random& rng, int steps = 100);

/// max(d(mu_0, gamma_0), d(mu_1, gamma_1)) / pi.
double error_metric(const Manifold& sphere, const GeodesicPoint& mu,
                    const GeodesicPoint& gamma);

/// Mean of the geodesics under the given metric.
GeodesicPoint estimate_mean(const Manifold& manifold,
                            const std::vector<GeodesicPoint>& geodesics,
                            const SimulationConfig& config,
                            std::vector<std::string>* warnings = nullptr);

struct ErrorSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stdev = 0.0;
  /// Bootstrap percentile interval of the mean (2000 resamples).
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Method-of-moments beta fit; zero when undefined.
  double beta_a = 0.0;
  double beta_b = 0.0;
};

ErrorSummary summarize_errors(const std::vector<double>& errors,
                              std::uint64_t seed, int resamples = 2000);

struct Repetition {
  double error = 0.0;
  bool ok = true;
  std::string failure;
  GeodesicPoint estimate;
};

struct RepeatedStudy {
  SimulationConfig config;
  std::vector<Repetition> repetitions;
  ErrorSummary summary;
  std::size_t failures = 0;
};

/// Repetition r draws its geodesics from Random(derive_seed(seed, r)).
RepeatedStudy study_repeated(const SimulationConfig& config);

/// Draws for repetition r of a study, reproducing study_repeated's samples.
std::vector<GeodesicPoint> draw_geodesics(const Manifold& sphere,
                                          const SimulationConfig& config,
                                          std::uint64_t stream_seed);

struct IncreasingRow {
  int n_geodesics = 0;
  double mean = 0.0;
  double stdev = 0.0;
  std::size_t failures = 0;
  std::vector<double> errors;
};

struct IncreasingStudy {
  std::vector<IncreasingRow> rows;
  /// Least-squares slope of the mean error against N.
  double slope = 0.0;
};

IncreasingStudy study_increasing(const SimulationConfig& config,
                                 const std::vector<int>& n_list);

}  // namespace geotrend
