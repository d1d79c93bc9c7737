#pragma once

#include <ostream>
#include <vector>

#include "kahler/calc/map_field.hpp"

namespace kahler::flow {

struct FlowParams {
  double dt = 0.0;  // <= 0 selects default_dt(chart)
  int max_steps = 200000;
  double tol = 1e-8;         // sup of |tension|_h
  double safeguard = 1e-12;  // allowed energy increase per step
};

/// 0.3 h^2 / sum_ab |Q_ab|, Q the inverse Riemannian metric in marked
/// coordinates. Stable for the explicit scheme with the 4th-order Laplacian.
double default_dt(const calc::FiberChart& chart);

struct FlowResult {
  calc::MapField map;
  int steps = 0;
  double dt = 0.0;
  double final_tension = 0.0;
  double max_energy_increase = 0.0;
  std::vector<double> energy;   // before each step, then at the limit
  std::vector<double> tension;  // sup |tension|_h, same indexing
};

/// Tension, energy density and sup norm on a grid lift (4th-order stencils).
struct GridTension {
  std::vector<double> tension;  // point-major, Riemannian tension vector
  double energy = 0.0;
  double sup = 0.0;
};
GridTension grid_tension(const calc::MapField& map);

/// Explicit heat flow phi <- exp_phi(dt tension(phi)) on the lift; the
/// monodromy is kept fixed. The returned map has no analytic closure.
/// Throws NonConvergenceError when max_steps run out and InstabilityError
/// when the energy increases by more than the safeguard.
FlowResult flow(const calc::MapField& map0, const FlowParams& params = {});

/// One extra step from a given map, returned as the sup-norm displacement.
double step_displacement(const calc::MapField& map, double dt);

inline constexpr double kPluriharmonicConstant = 10.0;

struct PluriharmonicReport {
  double dd_sup = 0.0;       // sup |D''d phi|
  double tension_sup = 0.0;  // sup |tr_g D''d phi|
  double flow_tol = 0.0;
  double h = 0.0;
  double threshold = 0.0;  // kPluriharmonicConstant * (flow_tol + h^2)
  bool condition_holds = false;
  double condition_max = 0.0;
  bool informational = false;  // target fails the curvature condition
  bool pass = false;
};

/// Pluriharmonicity check of a flowed map. Only a target passing the
/// non-strict curvature condition can PASS.
PluriharmonicReport verify_pluriharmonic(const calc::MapField& map, double flow_tol);

/// step,energy,tension
void write_energy_trace(std::ostream& os, const FlowResult& r);

}  // namespace kahler::flow
