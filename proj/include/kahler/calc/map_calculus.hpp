#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "kahler/calc/map_field.hpp"
#include "kahler/calc/pointwise.hpp"

namespace kahler::calc {

/// Per-point d f / dz^a and d f / dzbar^a (fiber indices only).
struct Differentials {
  std::vector<MapDerivs> at;
};
Differentials differentials(const MapField& map, DerivativePath path = DerivativePath::kAuto);

/// Per-point coefficients epsilon_{a bbar}.
std::vector<HMatrix> epsilon_form(const MapField& map,
                                  DerivativePath path = DerivativePath::kAuto);

enum class KMode { kIfAvailable, kRequired, kNone };

struct EnergyBreakdown {
  double E = 0.0;
  double E_prime = 0.0;
  double E_doubleprime = 0.0;
  std::optional<double> K;       // E' - E''
  std::optional<double> K_form;  // fiber integral of phi^* omega_N ^ omega^{n-1}/(n-1)!
  double max_split_defect = 0.0;  // max |e - e' - e''|
  double min_split_density = 0.0;
  std::vector<double> e_field;
};

/// Trapezoidal fiber integrals of the energy densities. The split and K need
/// a complex structure on the target (KMode::kRequired throws
/// UnsupportedInvariantError otherwise).
EnergyBreakdown energy(const MapField& map, KMode mode = KMode::kIfAvailable,
                       DerivativePath path = DerivativePath::kAuto);

struct SecondFundamentalField {
  std::vector<double> hs_norm;       // |D''d phi| per point
  std::vector<double> tension_norm;  // |tr_g D''d phi|_h per point
  double max_hs = 0.0;
  double max_tension = 0.0;
  double max_tension_coord = 0.0;  // sup over points and components of |2 tr|
};
SecondFundamentalField second_fundamental(const MapField& map,
                                          DerivativePath path = DerivativePath::kAuto);

/// Riemannian tension 2 tr_g D''d phi at one point (real coordinates).
TPoint tension_vector(const MapField& map, std::size_t idx,
                      DerivativePath path = DerivativePath::kAuto);

struct BochnerReport {
  int N = 0;
  std::size_t points = 0;
  double max_residual = 0.0;  // max |lhs - rhs|
  double max_lhs = 0.0;
  double max_rhs = 0.0;
  double max_curvature_term = 0.0;
  double max_hs_term = 0.0;
  bool whole_grid = false;
  double lhs_integral = 0.0;  // Stokes: should vanish (whole-grid mode)
  double rhs_integral = 0.0;
};

/// Contracted Bochner identity: lhs from 4th-order finite differences of the
/// epsilon coefficients, rhs from curvature and D''d phi. With sample indices
/// the lhs stencils are evaluated from the analytic closure around those
/// points only; otherwise the whole grid is processed and the integrals are
/// reported.
BochnerReport bochner_residual(const MapField& map, std::span<const std::size_t> samples = {});

struct BochnerConvergence {
  std::vector<int> grids;
  std::vector<double> residuals;
  std::vector<double> orders;
  bool warning = false;  // order estimate unreliable
};

/// Residual at fixed physical sample points on successively refined grids.
BochnerConvergence bochner_convergence(geom::TargetPtr target, const FiberChart& base,
                                       const MarkedMap& map,
                                       const std::array<TPoint, 2 * kMaxFiberDim>& shifts,
                                       std::span<const int> grids, std::size_t samples,
                                       std::uint64_t seed);

/// Debug snapshot: marked coordinates, lift, e, |D''d phi|, |tension|.
void write_field_csv(std::ostream& os, const MapField& map);

}  // namespace kahler::calc
