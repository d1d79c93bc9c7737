#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "kahler/calc/marked.hpp"
#include "kahler/core/types.hpp"
#include "kahler/geom/target_metric.hpp"

namespace kahler::calc {

/// Flat torus fiber C^n / (Z + lambda_j Z) (n = 1 or a product of two factors
/// for n = 2), discretized by an N-point periodic grid in each marked
/// coordinate. The Kahler form is i g_{a bbar} dz^a ^ dzbar^b with
/// g = scale * diag(1 / (2 Im lambda_j)), which has unit volume at scale 1.
struct FiberChart {
  int n = 1;
  int N = 64;
  std::array<cplx, kMaxFiberDim> lambda{cplx(0.0, 1.0), cplx(0.0, 1.0)};
  double scale = 1.0;

  static FiberChart torus(cplx lambda, int N);
  static FiberChart product(cplx lambda1, cplx lambda2, int N);

  int real_dim() const { return 2 * n; }
  std::size_t size() const;
  double spacing() const { return 1.0 / N; }
  std::span<const cplx> moduli() const { return {lambda.data(), static_cast<std::size_t>(n)}; }

  std::array<int, 2 * kMaxFiberDim> unravel(std::size_t idx) const;
  /// Index of grid coordinates c (each reduced mod N).
  std::size_t ravel(std::array<int, 2 * kMaxFiberDim> c) const;
  std::array<double, 2 * kMaxFiberDim> marked(std::size_t idx) const;

  /// g_{a bbar} at a grid point (the flat metric is the same everywhere).
  HMatrix metric(std::size_t idx = 0) const;
  /// dV_omega = volume_density * dw.
  double volume_density() const;
  /// Trapezoidal weight of one grid cell.
  double cell_weight() const;
  /// Coefficient of d/dw_a in d/dz^alpha.
  cplx dz_coeff(int alpha, int a) const;
  /// Inverse Riemannian metric in marked coordinates, (2n x 2n).
  Eigen::MatrixXd inverse_metric_w() const;
};

/// A map from a fiber into a target, stored as a lift on the grid, with the
/// lattice monodromy: lift(w + e_a) = lift(w) + shifts[a].
struct MapField {
  geom::TargetPtr target;
  FiberChart chart;
  std::vector<double> lift;  // point-major, target->dim entries per point
  std::array<TPoint, 2 * kMaxFiberDim> shifts;
  MarkedMap analytic;  // optional
  cplx t0 = 0.0;       // parameter value passed to the analytic closure

  int dim() const { return target->dim; }
  TPoint at(std::size_t idx) const;
  /// Lift value at grid coordinates outside the fundamental domain.
  double wrapped(std::array<int, 2 * kMaxFiberDim> c, int k) const;
};

std::array<TPoint, 2 * kMaxFiberDim> zero_shifts(int dim);

/// Samples the closure on the grid and keeps it for analytic derivatives.
MapField sample_map(geom::TargetPtr target, const FiberChart& chart, MarkedMap map,
                    std::array<TPoint, 2 * kMaxFiberDim> shifts, cplx t0 = 0.0);

/// Throws BoundaryMismatchError when the lift is not compatible with the
/// recorded monodromy. Analytic maps are checked on boundary pairs against
/// their closure; grid lifts by the smoothness of the seam.
void check_periodicity(const MapField& map, double tol = 1e-9);

enum class DerivativePath { kAuto, kAnalytic, kGrid };

/// Derivatives at a grid point, analytic when a closure is present (kAuto),
/// else 4th-order periodic central differences with monodromy.
MapDerivs evaluate(const MapField& map, std::size_t idx,
                   DerivativePath path = DerivativePath::kAuto);

/// Derivatives of the analytic closure at arbitrary marked coordinates.
MapDerivs evaluate_analytic(const MarkedMap& f, int dim, std::span<const cplx> moduli,
                            std::span<const double> w, cplx t0);

/// Real Taylor data of lift component k at a grid point from the stencils
/// (w-derivatives only).
RealTaylor grid_taylor(const MapField& map, std::size_t idx, int k);

/// Fourth-order central difference weights for offsets -2..2.
inline constexpr std::array<double, 5> kD1 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
inline constexpr std::array<double, 5> kD2 = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12,
                                              -1.0 / 12};

}  // namespace kahler::calc
