#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kahler/calc/map_calculus.hpp"
#include "kahler/calc/map_field.hpp"
#include "kahler/calc/marked.hpp"
#include "kahler/geom/target_metric.hpp"

namespace kahler::family {

/// Holomorphic family of tori C^n / (Z + lambda_j(t) Z) over the disk |t| <
/// disk_radius with total-space Kahler potential
///   Phi = sum_j (Im z_j)^2 / Im lambda_j(t) + C |t|^2,
/// and a family of maps given in marked coordinates.
struct FamilySpec {
  int n = 1;
  std::array<calc::Polynomial, kMaxFiberDim> lambda{calc::Polynomial::constant(kI),
                                                    calc::Polynomial::constant(kI)};
  double C = 1.0;
  double disk_radius = 1.0;
  geom::TargetPtr target;
  /// Lift of phi_t in marked coordinates, analytic in (w, t, tbar).
  calc::MarkedMap map;
  std::array<TPoint, 2 * kMaxFiberDim> shifts;
  /// Grid-only alternative to `map`: the lift of phi_t on the chart of M_t.
  /// t-derivatives then come from central differences of radius t_step.
  std::function<calc::MapField(cplx t, const calc::FiberChart&)> fiber_map;
  double t_step = 1e-3;
  int grid = 64;          // points per real direction for n = 1
  int grid_product = 16;  // points per real direction for n = 2
  /// Pluriharmonicity gate for Levi computations.
  double gate = 1e-7;

  std::span<const calc::Polynomial> moduli_polys() const {
    return {lambda.data(), static_cast<std::size_t>(n)};
  }
  std::array<cplx, kMaxFiberDim> moduli(cplx t) const;
  int grid_points() const { return n == 1 ? grid : grid_product; }
};

/// Chart of the fiber over t (throws DomainError if t leaves the disk or a
/// modulus leaves the upper half-plane).
calc::FiberChart chart_at(const FamilySpec& spec, cplx t);
void check_domain(const FamilySpec& spec, cplx t);

/// Total-space metric components at a fiber point. G is (n+1)x(n+1) with the
/// t index last: G(a, b) = d_a d_bbar Phi.
struct TotalMetric {
  HMatrix G;
  HMatrix g() const { return G.topLeftCorner(G.rows() - 1, G.rows() - 1); }
  cplx g_t(int beta) const { return G(G.rows() - 1, beta); }  // g_{t betabar}
  double g_tt() const { return G(G.rows() - 1, G.rows() - 1).real(); }
};
TotalMetric fiber_metric(const FamilySpec& spec, std::span<const double> w, cplx t);

/// Sweep of the total metric over the grid of each sampled fiber; C is doubled
/// (at most 10 times) until G is positive everywhere. Returns the accepted C
/// or throws PositivityError naming the witness point.
double ensure_positive(FamilySpec& spec, std::span<const cplx> t_samples);

/// H = d/dt + a^alpha d/dz^alpha at one point.
struct HorizontalLift {
  std::array<cplx, kMaxFiberDim> a{};
  double psi = 0.0;             // |H|^2
  double horizontality = 0.0;   // max_beta |sum_alpha a^alpha g_{alpha betabar} + g_{t betabar}|
  /// A^alpha_betabar = d a^alpha / d zbar^beta, indexed [alpha][beta].
  std::array<std::array<cplx, kMaxFiberDim>, kMaxFiberDim> A{};
  HMatrix G;
};
HorizontalLift horizontal_lift(const FamilySpec& spec, std::span<const double> w, cplx t);

struct KodairaSpencer {
  std::vector<std::array<std::array<cplx, kMaxFiberDim>, kMaxFiberDim>> A;  // per point
  std::array<std::array<cplx, kMaxFiberDim>, kMaxFiberDim> mean{};          // class rep.
  double mean_norm = 0.0;  // sqrt(sum |mean|^2 g_{alpha alphabar} g^{beta betabar})
};
KodairaSpencer kodaira_spencer(const FamilySpec& spec, cplx t);

/// Fiber over t: chart, sampled map, and total-space derivatives per point.
struct Fiber {
  cplx t0;
  calc::FiberChart chart;
  calc::MapField map;
  std::vector<calc::MapDerivs> f;  // has_t = true
  std::vector<HorizontalLift> lift;
};
Fiber build_fiber(const FamilySpec& spec, cplx t0);

/// Map of the fiber over t (analytic closure kept when present).
calc::MapField fiber_map(const FamilySpec& spec, cplx t);

struct DiskSample {
  cplx t;
  double E = 0.0, E1 = 0.0, E2 = 0.0;
  std::optional<double> K, K_form;
};
std::vector<DiskSample> energy_over_disk(const FamilySpec& spec, std::span<const cplx> t_samples);
DiskSample energy_at(const FamilySpec& spec, cplx t);

/// sup |D''d phi| over the fiber (unitary frame).
double pluriharmonic_residual(const FamilySpec& spec, const Fiber& fiber);

struct LeviReport {
  cplx t0;
  double E = 0.0;
  cplx dE_dt;  // from the stencil
  double curvature_term = 0.0;
  double norm_term = 0.0;
  double levi_formula = 0.0;
  double levi_stencil = 0.0;
  std::optional<double> levi_oracle;
  double stencil_delta = 0.0;
  double pluriharmonic_residual = 0.0;
  // strictness diagnostics
  double strictness = 0.0;            // L2 norm of dzbar^b (x) D_H f_*d_bbar
  double strictness_identity = 0.0;   // |2 strictness^2 - norm_term|
  double phiA_norm = 0.0;
  double nabla_fH_norm = 0.0;
  double phiA_minus_nabla = 0.0;      // L2 norm of nabla''(f_*H) - phi_*A
  std::optional<double> class_average;  // |mean of phi_*A| (flat targets)
  std::optional<bool> class_predicts_strict;
  std::optional<bool> prediction_confirmed;
  double residual_formula_stencil = 0.0;
  std::optional<double> residual_formula_oracle;
  std::optional<double> residual_stencil_oracle;
};

inline constexpr double kClassMargin = 1e-8;

/// Levi form by the second-variation formula and by the 5-point stencil of
/// E(t). Throws PreconditionError if phi_{t0} fails the gate and DomainError
/// if the stencil leaves the disk.
LeviReport levi_form(const FamilySpec& spec, cplx t0, double stencil_delta,
                     std::function<double(cplx)> oracle = {});

struct LeviTerms {
  double curvature_term = 0.0;
  double norm_term = 0.0;
};
LeviTerms levi_terms(const FamilySpec& spec, const Fiber& fiber);

/// Strictness fields of a report. The class average
/// needs a flat target; request_class on a curved target throws
/// UnsupportedProjectionError.
void strictness_diagnostics(const FamilySpec& spec, const Fiber& fiber, LeviReport& report,
                            bool request_class);

double levi_stencil(const FamilySpec& spec, cplx t0, double delta, double* E0 = nullptr,
                    cplx* dE = nullptr);

/// The six terms of F on the fiber, and F against the Bochner right side on
/// the total space.
struct FStructure {
  std::array<double, 6> max_abs{};  // sup |term_i|
  double cancel_56 = 0.0;           // sup |term5 + term6|
  double total_vs_bochner = 0.0;    // sup |F - rhs of the total-space Bochner identity|
  double reduced_vs_full = 0.0;     // sup |F - (term2 + term4)|
  double pluriharmonic_residual = 0.0;
};
FStructure f_structure_check(const FamilySpec& spec, cplx t0, bool override_gate = false);

/// sup over the fiber of |omega^{n+1}/(n+1)! - i psi dt^dtbar ^ omega^n/n!|
/// (top coefficients in the coordinate coframe).
struct VolumeIdentity {
  double max_residual = 0.0;
  double max_value = 0.0;
};
VolumeIdentity volume_identity_residual(const FamilySpec& spec, cplx t0);

}  // namespace kahler::family
