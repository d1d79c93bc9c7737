#pragma once

#include <array>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "kahler/core/types.hpp"

namespace kahler::geom {

using MetricGradient = std::array<TMatrix, kMaxTargetDim>;  // [k](i,j) = d_k h_ij
using MetricHessian =
    std::array<std::array<TMatrix, kMaxTargetDim>, kMaxTargetDim>;  // [k][l](i,j)

/// A Riemannian target (N, h) in a single global chart, supplied as analytic
/// closures for the metric and its first two coordinate derivatives.
struct TargetMetric {
  std::string name;
  int dim = 0;
  std::function<TMatrix(const TPoint&)> h;
  std::function<MetricGradient(const TPoint&)> dh;
  std::function<MetricHessian(const TPoint&)> d2h;
  /// exp_p(v) in chart coordinates; continuous in v so that lifts stay on the
  /// same sheet of any angular coordinate.
  std::function<TPoint(const TPoint&, const TPoint&)> exp;
  /// Parallel complex structure J (J^2 = -1, h-orthogonal). Empty when the
  /// target is not registered as Kahler.
  std::function<TMatrix(const TPoint&)> complex_structure;
  std::function<bool(const TPoint&)> in_domain;
  std::function<TPoint(std::mt19937_64&)> sample_point;
  bool flat = false;

  bool is_kahler() const { return static_cast<bool>(complex_structure); }
};

using TargetPtr = std::shared_ptr<const TargetMetric>;

TargetPtr flat_plane();
TargetPtr hyperbolic_upper_half_plane();
/// Hyperbolic plane in Fermi coordinates (theta, r) around the geodesic r = 0:
/// h = cosh^2(r) dtheta^2 + dr^2. Quotienting theta by L gives the hyperbolic
/// cylinder whose core geodesic has length L.
TargetPtr hyperbolic_cylinder();
TargetPtr unit_sphere();
TargetPtr product(TargetPtr a, TargetPtr b);

/// Lookup by registry name: "flat-torus-R2", "hyperbolic-upper-half-plane",
/// "hyperbolic-cylinder", "sphere-1", or "product:<a>,<b>".
TargetPtr make_target(std::string_view name);
std::vector<std::string> registered_targets();

/// Smallest eigenvalue of h(p); throws DegenerateMetricError when it is not
/// positive.
double check_positive(const TargetMetric& metric, const TPoint& p);

}  // namespace kahler::geom
