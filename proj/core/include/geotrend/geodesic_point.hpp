#pragma once

#include <string>
#include <vector>

#include "geotrend/types.hpp"

namespace geotrend {

/// A geodesic identified with its endpoints: x at t = 0 and y at t = 1.
struct GeodesicPoint {
  Vec x;
  Vec y;
};

/// Nodes in [0, 1] with positive weights summing to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Composite trapezoid rule on `count` uniform nodes (count >= 2).
  static QuadratureRule trapezoid(int count);
  /// Gauss-Legendre rule with `count` nodes mapped to [0, 1].
  static QuadratureRule gauss_legendre(int count);
  /// Parses "trapezoid:K" or "gauss:K".
  static QuadratureRule parse(const std::string& spec);

  std::string describe() const;
  std::size_t size() const { return nodes.size(); }

  std::string kind = "trapezoid";
};

/// Trapezoid on 17 uniform nodes.
QuadratureRule default_quadrature();

}  // namespace geotrend
