#pragma once

// Seeded random numbers with a fixed, documented algorithm so that outputs
// are reproducible across platforms and standard libraries. The engine is
// std::mt19937_64 (fully specified by the standard); all transforms on top
// of it are implemented here rather than with <random> distributions, whose
// output is implementation defined.

#include <cstdint>
#include <random>
#include <vector>

#include "geotrend/manifold.hpp"

namespace geotrend {

/// Recorded in output metadata.
inline constexpr const char* kRngAlgorithm =
    "mt19937_64/splitmix64-substreams/box-muller v1";

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the independent stream with the given index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the Box-Muller transform (pairs are cached).
  double normal();
  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Isotropic Gaussian in T_x M: sigma times standard normal coordinates over
/// the manifold's orthonormal tangent basis.
Vec sample_tangent_gaussian(const Manifold& manifold, const Vec& x,
                            double sigma, Random& rng);

}  // namespace geotrend
