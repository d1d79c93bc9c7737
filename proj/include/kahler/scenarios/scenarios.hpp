#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kahler/family/family.hpp"

namespace kahler::scenarios {

using Oracle = std::function<double(cplx)>;

struct Scenario {
  std::string name;
  std::string description;
  family::FamilySpec spec;
  Oracle E, K, E2, levi;  // empty when no closed form is known
  double sweep_radius = 0.4;
  /// phi_t pluriharmonic on every fiber of the sweep (else only at t = 0).
  bool pluriharmonic_on_disk = true;
  /// Levi form and strictness diagnostics vanish at t = 0.
  bool degenerate = false;
  /// Designed negative control; its checks are expected to fail.
  enum class Control { kNone, kCurvature, kPluriharmonic } control = Control::kNone;
};

/// Affine maps C/(Z + lambda(t) Z) -> C/(Z + tau Z) into the flat torus.
Scenario torus_affine(const calc::Polynomial& lambda, cplx tau);

/// Product of two affine factors (n = 2, target R^2 x R^2).
Scenario product_torus(const calc::Polynomial& lambda1, const calc::Polynomial& lambda2, cplx tau1,
                       cplx tau2);

/// Wraps the torus onto the closed geodesic of length L of the hyperbolic
/// cylinder, `winding` times along the second lattice generator.
Scenario geodesic_valued(const calc::Polynomial& lambda, double L, int winding);

/// Identity-type map into the fixed torus tau = lambda(0).
Scenario holomorphic_family(const calc::Polynomial& lambda);

/// Constant family lambda0 with the t-dependent map
/// w -> identity + eps Re(t) (sin 2 pi w_1, 0).
Scenario reparametrized_constant(cplx lambda0, double eps);

/// Affine map plus amp * sin(2 pi w_1) in the first component; not harmonic.
Scenario nonpluriharmonic_control(const calc::Polynomial& lambda, cplx tau, double amp);

/// Equatorial map into the unit sphere; the curvature condition fails.
Scenario sphere_control(const calc::Polynomial& lambda);

std::vector<std::string> scenario_names();
/// Throws InvalidInputError for an unknown name.
Scenario make_scenario(const std::string& name);

/// Closed forms for the affine torus map.
double affine_energy(cplx lambda, cplx tau);
double affine_e2(cplx lambda, cplx tau);
double affine_levi(cplx lambda, cplx dlambda, cplx tau);

}  // namespace kahler::scenarios
