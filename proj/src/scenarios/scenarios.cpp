#include "kahler/scenarios/scenarios.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "kahler/core/errors.hpp"

namespace kahler::scenarios {

using calc::Polynomial;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_upper(cplx tau, const char* what) {
  if (!(tau.imag() > 0.0)) throw DomainError(std::string(what) + " must lie in the upper half-plane");
}

// disk on which Im lambda(t) stays above a margin, probed on rings
double working_radius(const Polynomial& p, double cap) {
  double r = cap;
  for (int shrink = 0; shrink < 60; ++shrink) {
    bool ok = true;
    for (int k = 0; k < 64 && ok; ++k) {
      const cplx t = std::polar(r, kTwoPi * k / 64.0);
      ok = p(t).imag() > 0.1;
    }
    if (ok) return r;
    r *= 0.9;
  }
  throw DomainError("lambda(t) leaves the upper half-plane near t = 0");
}

std::array<TPoint, 4> affine_shifts(cplx tau, int dim, int offset) {
  auto s = calc::zero_shifts(dim);
  s[0](offset) = 1.0;
  s[1](offset) = tau.real();
  s[1](offset + 1) = tau.imag();
  return s;
}

}  // namespace

double affine_energy(cplx lambda, cplx tau) {
  const double x = lambda.real(), y = lambda.imag(), p = tau.real(), q = tau.imag();
  return 0.5 * (y + ((p - x) * (p - x) + q * q) / y);
}

double affine_e2(cplx lambda, cplx tau) { return std::norm(tau - lambda) / (4.0 * lambda.imag()); }

double affine_levi(cplx lambda, cplx dlambda, cplx tau) {
  const double x = lambda.real(), y = lambda.imag(), p = tau.real(), q = tau.imag();
  return std::norm(dlambda) * 0.25 * (1.0 / y + ((p - x) * (p - x) + q * q) / (y * y * y));
}

Scenario torus_affine(const Polynomial& lambda, cplx tau) {
  require_upper(tau, "tau");
  require_upper(lambda(cplx(0.0)), "lambda(0)");
  Scenario sc;
  sc.name = "torus-affine";
  sc.description = "affine maps between flat tori, lambda coefficients (re,im per power of t) = " + lambda.to_string();
  auto& s = sc.spec;
  s.n = 1;
  s.lambda[0] = lambda;
  s.disk_radius = working_radius(lambda, 0.9);
  sc.sweep_radius = std::min(0.4, 0.8 * s.disk_radius);
  s.target = geom::flat_plane();
  s.map = [tau](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = w[0] + tau.real() * w[1];
    out[1] = tau.imag() * w[1];
  };
  s.shifts = affine_shifts(tau, 2, 0);
  sc.E = [lambda, tau](cplx t) { return affine_energy(lambda(t), tau); };
  sc.K = [tau](cplx) { return tau.imag(); };
  sc.E2 = [lambda, tau](cplx t) { return affine_e2(lambda(t), tau); };
  sc.levi = [lambda, tau](cplx t) { return affine_levi(lambda(t), lambda.derivative(t), tau); };
  sc.degenerate = lambda.derivative(cplx(0.0)) == cplx(0.0);
  return sc;
}

Scenario product_torus(const Polynomial& lambda1, const Polynomial& lambda2, cplx tau1,
                       cplx tau2) {
  const Scenario a = torus_affine(lambda1, tau1);
  const Scenario b = torus_affine(lambda2, tau2);
  Scenario sc;
  sc.name = "product-torus";
  sc.description = "product of two affine torus maps";
  auto& s = sc.spec;
  s.n = 2;
  s.lambda = {lambda1, lambda2};
  s.disk_radius = std::min(a.spec.disk_radius, b.spec.disk_radius);
  sc.sweep_radius = std::min(a.sweep_radius, b.sweep_radius);
  s.target = geom::product(geom::flat_plane(), geom::flat_plane());
  s.map = [tau1, tau2](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = w[0] + tau1.real() * w[1];
    out[1] = tau1.imag() * w[1];
    out[2] = w[2] + tau2.real() * w[3];
    out[3] = tau2.imag() * w[3];
  };
  auto s1 = affine_shifts(tau1, 4, 0);
  auto s2 = affine_shifts(tau2, 4, 2);
  s.shifts = {s1[0], s1[1], s2[0], s2[1]};
  sc.E = [ea = a.E, eb = b.E](cplx t) { return ea(t) + eb(t); };
  sc.K = [ka = a.K, kb = b.K](cplx t) { return ka(t) + kb(t); };
  sc.E2 = [ea = a.E2, eb = b.E2](cplx t) { return ea(t) + eb(t); };
  sc.levi = [la = a.levi, lb = b.levi](cplx t) { return la(t) + lb(t); };
  return sc;
}

Scenario geodesic_valued(const Polynomial& lambda, double L, int winding) {
  require_upper(lambda(cplx(0.0)), "lambda(0)");
  if (!(L > 0.0)) throw InvalidInputError("geodesic length must be positive");
  Scenario sc;
  sc.name = "geodesic-valued";
  sc.description = "torus wrapped onto the core geodesic of a hyperbolic cylinder";
  sc.degenerate = winding == 0;
  auto& s = sc.spec;
  s.lambda[0] = lambda;
  s.disk_radius = working_radius(lambda, 0.9);
  sc.sweep_radius = std::min(0.4, 0.8 * s.disk_radius);
  s.target = geom::hyperbolic_cylinder();
  const double kL = winding * L;
  s.map = [kL](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = kL * w[1];
    out[1] = Jet(0.0);
  };
  s.shifts = calc::zero_shifts(2);
  s.shifts[1](0) = kL;
  // harmonic map to a circle of length kL along w_1: e = (kL)^2 / (2 Im lambda)
  sc.E = [lambda, kL](cplx t) { return 0.5 * kL * kL / lambda(t).imag(); };
  sc.K = [](cplx) { return 0.0; };
  sc.E2 = [lambda, kL](cplx t) { return 0.25 * kL * kL / lambda(t).imag(); };
  sc.levi = [lambda, kL](cplx t) {
    const double y = lambda(t).imag();
    return std::norm(lambda.derivative(t)) * 0.25 * kL * kL / (y * y * y);
  };
  return sc;
}

Scenario holomorphic_family(const Polynomial& lambda) {
  Scenario sc = torus_affine(lambda, lambda(cplx(0.0)));
  sc.name = "holomorphic-family";
  sc.description = "holomorphic identity at t = 0 into the fixed torus tau = lambda(0)";
  return sc;
}

Scenario reparametrized_constant(cplx lambda0, double eps) {
  require_upper(lambda0, "lambda");
  Scenario sc;
  sc.name = "reparametrized-constant";
  sc.description = "constant family with a t-dependent reparametrized map";
  sc.pluriharmonic_on_disk = false;
  auto& s = sc.spec;
  s.lambda[0] = Polynomial::constant(lambda0);
  s.disk_radius = 0.9;
  s.target = geom::flat_plane();
  s.map = [lambda0, eps](std::span<const Jet> w, const Jet& t, const Jet& tb, std::span<Jet> out) {
    const Jet re = 0.5 * (t + tb);
    out[0] = w[0] + lambda0.real() * w[1] + eps * re * sin(kTwoPi * w[1]);
    out[1] = lambda0.imag() * w[1];
  };
  s.shifts = affine_shifts(lambda0, 2, 0);
  const double y = lambda0.imag();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  sc.E = [y, eps, pi2](cplx t) { return y + pi2 * eps * eps * t.real() * t.real() / y; };
  sc.K = [y](cplx) { return y; };
  sc.levi = [y, eps, pi2](cplx) { return pi2 * eps * eps / (2.0 * y); };
  return sc;
}

Scenario nonpluriharmonic_control(const Polynomial& lambda, cplx tau, double amp) {
  Scenario sc = torus_affine(lambda, tau);
  sc.name = "control-nonpluriharmonic";
  sc.description = "affine map plus a sine bump; not harmonic";
  sc.control = Scenario::Control::kPluriharmonic;
  sc.pluriharmonic_on_disk = false;
  sc.spec.map = [tau, amp](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = w[0] + tau.real() * w[1] + amp * sin(kTwoPi * w[1]);
    out[1] = tau.imag() * w[1];
  };
  sc.E = {};
  sc.E2 = {};
  sc.levi = {};
  return sc;
}

Scenario sphere_control(const Polynomial& lambda) {
  require_upper(lambda(cplx(0.0)), "lambda(0)");
  Scenario sc;
  sc.name = "control-sphere";
  sc.description = "equatorial map into the round sphere";
  sc.control = Scenario::Control::kCurvature;
  auto& s = sc.spec;
  s.lambda[0] = lambda;
  s.disk_radius = working_radius(lambda, 0.9);
  sc.sweep_radius = std::min(0.4, 0.8 * s.disk_radius);
  s.target = geom::unit_sphere();
  s.map = [](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = Jet(0.5 * std::numbers::pi);
    out[1] = kTwoPi * w[0];
  };
  s.shifts = calc::zero_shifts(2);
  s.shifts[0](1) = kTwoPi;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  sc.E = [lambda, pi2](cplx t) {
    const cplx l = lambda(t);
    return 2.0 * pi2 * std::norm(l) / l.imag();
  };
  sc.K = [](cplx) { return 0.0; };
  sc.levi = [lambda, pi2](cplx t) {
    const cplx l = lambda(t);
    const double x = l.real(), y = l.imag();
    return std::norm(lambda.derivative(t)) * pi2 * (1.0 / y + x * x / (y * y * y));
  };
  return sc;
}

namespace {

const Polynomial kStandard({kI, 1.0});

using Factory = std::function<Scenario()>;

const std::vector<std::pair<std::string, Factory>>& registry() {
  static const std::vector<std::pair<std::string, Factory>> r = {
      {"standard", [] { return torus_affine(kStandard, kI); }},
      {"stationary", [] { return torus_affine(Polynomial({kI, 0.0, 1.0}), kI); }},
      {"chain-2t", [] { return torus_affine(Polynomial({kI, 2.0}), kI); }},
      {"chain-it", [] { return torus_affine(Polynomial({kI, kI}), kI); }},
      {"tilted", [] { return torus_affine(Polynomial({cplx(0.3, 1.2), cplx(0.5, -0.2)}), cplx(-0.2, 0.9)); }},
      {"constant-family", [] { return torus_affine(Polynomial::constant(cplx(0.1, 1.1)), kI); }},
      {"product", [] { return product_torus(kStandard, kStandard, kI, kI); }},
      {"product-half", [] { return product_torus(kStandard, Polynomial::constant(kI), kI, kI); }},
      {"product-swapped", [] { return product_torus(Polynomial::constant(kI), kStandard, kI, kI); }},
      {"geodesic", [] { return geodesic_valued(kStandard, 1.5, 1); }},
      {"geodesic-winding0", [] { return geodesic_valued(kStandard, 1.5, 0); }},
      {"holomorphic", [] { return holomorphic_family(kStandard); }},
      {"reparametrized", [] { return reparametrized_constant(kI, 0.5); }},
      {"control-nonpluriharmonic", [] { return nonpluriharmonic_control(kStandard, kI, 0.3); }},
      {"control-sphere", [] { return sphere_control(kStandard); }},
  };
  return r;
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& [n, f] : registry()) names.push_back(n);
  return names;
}

Scenario make_scenario(const std::string& name) {
  for (const auto& [n, f] : registry()) {
    if (n == name) {
      Scenario s = f();
      s.name = n;
      return s;
    }
  }
  throw InvalidInputError("unknown scenario '" + name + "'");
}

}  // namespace kahler::scenarios
