#include <cmath>
#include <numbers>
#include <string>

#include "geotrend/geodesic_point.hpp"

namespace geotrend {

QuadratureRule QuadratureRule::trapezoid(int count) {
  if (count < 2) {
    throw Error(ErrorKind::InvalidInput, "trapezoid rule needs >= 2 nodes");
  }
  QuadratureRule q;
  q.kind = "trapezoid";
  const double h = 1.0 / (count - 1);
  for (int i = 0; i < count; ++i) {
    q.nodes.push_back(i == count - 1 ? 1.0 : i * h);
    q.weights.push_back((i == 0 || i == count - 1) ? 0.5 * h : h);
  }
  return q;
}

QuadratureRule QuadratureRule::gauss_legendre(int count) {
  if (count < 1) {
    throw Error(ErrorKind::InvalidInput, "gauss rule needs >= 1 node");
  }
  QuadratureRule q;
  q.kind = "gauss";
  q.nodes.resize(count);
  q.weights.resize(count);
  // Newton iteration on P_n from the Chebyshev-like initial guesses.
  for (int i = 0; i < count; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int j = 2; j <= count; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Reversed so nodes ascend on [0, 1].
    q.nodes[count - 1 - i] = 0.5 * (1.0 + z);
    q.weights[count - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return q;
}

QuadratureRule QuadratureRule::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorKind::InvalidInput,
                "quadrature must be 'trapezoid:K' or 'gauss:K': " + spec);
  }
  const std::string kind = spec.substr(0, colon);
  int count = 0;
  try {
    std::size_t used = 0;
    count = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument(spec);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "bad quadrature node count: " + spec);
  }
  if (kind == "trapezoid") return trapezoid(count);
  if (kind == "gauss") return gauss_legendre(count);
  throw Error(ErrorKind::InvalidInput, "unknown quadrature kind: " + kind);
}

std::string QuadratureRule::describe() const {
  return kind + ":" + std::to_string(nodes.size());
}

QuadratureRule default_quadrature() { return QuadratureRule::trapezoid(17); }

}  // namespace geotrend
