#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "kahler/core/errors.hpp"
#include "kahler/scenarios/scenarios.hpp"

namespace kahler::scenarios {
namespace {

constexpr double kPi = std::numbers::pi;

family::FamilySpec coarse(const Scenario& sc) {
  family::FamilySpec s = sc.spec;
  s.grid = 32;
  s.grid_product = 8;
  return s;
}

std::vector<cplx> ring(double r, int k) {
  std::vector<cplx> ts{0.0};
  for (int j = 0; j < k; ++j) ts.push_back(std::polar(r, 2 * kPi * (j + 0.25) / k));
  return ts;
}

TEST(Registry, NamesAreUniqueAndConstructible) {
  const auto names = scenario_names();
  EXPECT_GE(names.size(), 10u);
  std::set<std::string> seen(names.begin(), names.end());
  EXPECT_EQ(seen.size(), names.size());
  for (const auto& n : names) {
    const auto sc = make_scenario(n);
    EXPECT_EQ(sc.name, n);
    EXPECT_FALSE(sc.description.empty());
    EXPECT_GT(sc.sweep_radius, 0.0);
    EXPECT_LT(sc.sweep_radius, sc.spec.disk_radius);
  }
  EXPECT_THROW(make_scenario("no-such-family"), InvalidInputError);
}

TEST(Affine, ClosedFormsAgainstDirectIntegral) {
  // phi = a z + b zbar on the fiber of area 1 in |dz|^2 / y, flat target |dz|^2
  const cplx lam(0.3, 1.4), tau(-0.2, 0.8);
  const cplx b = (tau - lam) / (std::conj(lam) - lam);
  const cplx a = 1.0 - b;
  const double y = lam.imag();
  const double e = 0.5 * 2.0 * y * (std::norm(a) + std::norm(b));
  EXPECT_NEAR(affine_energy(lam, tau), e, 1e-14);
  EXPECT_NEAR(affine_e2(lam, tau), std::norm(b) * y, 1e-14);
  EXPECT_NEAR(affine_energy(lam, tau) - affine_e2(lam, tau), std::norm(a) * y, 1e-14);
}

TEST(Oracles, EnergyMatchesComputedSweep) {
  for (const auto& n : scenario_names()) {
    const auto sc = make_scenario(n);
    if (!sc.E) continue;
    const auto rows = family::energy_over_disk(coarse(sc), ring(sc.sweep_radius, 6));
    for (const auto& r : rows) {
      EXPECT_NEAR(r.E, sc.E(r.t), 1e-8) << n << " t=" << r.t;
      if (sc.E2) {
        EXPECT_NEAR(r.E2, sc.E2(r.t), 1e-8) << n << " t=" << r.t;
      }
      if (sc.K && r.K) {
        EXPECT_NEAR(*r.K, sc.K(r.t), 1e-10) << n << " t=" << r.t;
      }
    }
  }
}

TEST(Oracles, LeviMatchesFormulaAtCentre) {
  for (const auto& n : scenario_names()) {
    const auto sc = make_scenario(n);
    if (!sc.levi || sc.control != Scenario::Control::kNone) continue;
    const auto r = family::levi_form(coarse(sc), 0.0, 1e-3, sc.levi);
    EXPECT_NEAR(r.levi_formula, sc.levi(0.0), 1e-8) << n;
    EXPECT_NEAR(r.levi_stencil, sc.levi(0.0), 1e-5) << n;
    if (sc.degenerate) {
      EXPECT_LT(std::abs(r.levi_formula), 1e-12) << n;
    }
  }
}

TEST(Oracles, LeviOffCentreForPluriharmonicFamilies) {
  for (const auto& n : scenario_names()) {
    const auto sc = make_scenario(n);
    if (!sc.levi || !sc.pluriharmonic_on_disk || sc.control != Scenario::Control::kNone) continue;
    const cplx t0 = std::polar(0.5 * sc.sweep_radius, 0.7);
    const auto r = family::levi_form(coarse(sc), t0, 1e-3, sc.levi);
    EXPECT_NEAR(r.levi_formula, sc.levi(t0), 1e-8) << n;
  }
}

TEST(Controls, NonPluriharmonicIsGated) {
  const auto sc = make_scenario("control-nonpluriharmonic");
  EXPECT_EQ(sc.control, Scenario::Control::kPluriharmonic);
  EXPECT_THROW(family::levi_form(coarse(sc), 0.0, 1e-3), PreconditionError);
}

TEST(Controls, SphereHasNoClassProjection) {
  const auto sc = make_scenario("control-sphere");
  EXPECT_EQ(sc.control, Scenario::Control::kCurvature);
  const auto r = family::levi_form(coarse(sc), 0.0, 1e-3);
  EXPECT_FALSE(r.class_average.has_value());
  EXPECT_NEAR(r.E, 2 * kPi * kPi, 1e-8);  // lambda = i
}

TEST(Reparametrized, PluriharmonicOnlyOnImaginaryAxis) {
  const auto sc = make_scenario("reparametrized");
  EXPECT_FALSE(sc.pluriharmonic_on_disk);
  const auto s = coarse(sc);
  EXPECT_LT(family::pluriharmonic_residual(s, family::build_fiber(s, cplx(0.0, 0.2))), 1e-10);
  EXPECT_GT(family::pluriharmonic_residual(s, family::build_fiber(s, 0.2)), 1e-2);
}

TEST(WorkingRadius, ModuliStayInUpperHalfPlane) {
  for (const auto& n : scenario_names()) {
    const auto sc = make_scenario(n);
    for (int k = 0; k < 64; ++k) {
      const auto m = sc.spec.moduli(std::polar(sc.sweep_radius, 2 * kPi * k / 64));
      for (int j = 0; j < sc.spec.n; ++j) EXPECT_GT(m[j].imag(), 0.1) << n;
    }
  }
}

}  // namespace
}  // namespace kahler::scenarios
