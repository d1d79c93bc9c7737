#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kahler/core/jet.hpp"
#include "kahler/core/types.hpp"

namespace kahler::calc {

/// Complex polynomial sum c_k t^k.
struct Polynomial {
  std::vector<cplx> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<cplx> c) : coeffs(std::move(c)) {}
  static Polynomial constant(cplx c) { return Polynomial({c}); }

  cplx operator()(cplx t) const;
  cplx derivative(cplx t) const;
  Polynomial derivative() const;
  Jet operator()(const Jet& t) const;
  /// conj(p(t)) as a function of tbar: sum conj(c_k) tbar^k.
  Jet conj_eval(const Jet& tbar) const;
  bool is_constant() const;
  std::string to_string() const;
};

/// Jet variable layout on the total space of a family with n fiber
/// coordinates: z^a (a < n) and t (a = n) are holomorphic indices, and the
/// conjugate of holomorphic index a sits at a + n + 1.
struct JetLayout {
  int n = 1;
  int holo_count() const { return n + 1; }
  int nvars() const { return 2 * (n + 1); }
  int t() const { return n; }
  int bar(int a) const { return a + n + 1; }
};

/// Marked coordinates w in [0,1)^{2n} with z_j = w_{2j} + lambda_j(t) w_{2j+1}.
/// Returns jets of w_a, t and tbar in the variables of JetLayout{n}, expanded
/// at the point with marked coordinates w0 on the fiber over t0.
struct MarkedJets {
  std::array<Jet, 2 * kMaxFiberDim> w;
  Jet t;
  Jet tbar;
};
MarkedJets marked_jets(std::span<const Polynomial> lambda, std::span<const double> w0, cplx t0);

/// Same, for a single fiber with constant moduli; t is still a variable (with
/// value t0) so that t-dependent maps can be evaluated on the fiber.
MarkedJets marked_jets(std::span<const cplx> lambda, std::span<const double> w0, cplx t0 = 0.0);

/// d w_a / d z_j at modulus lambda_j (only a = 2j, 2j+1 are nonzero).
inline std::array<cplx, 2> dw_dz(cplx lambda) {
  const double x = lambda.real(), y = lambda.imag();
  return {cplx(0.5, x / (2.0 * y)), cplx(0.0, -1.0 / (2.0 * y))};
}

/// Analytic map in marked coordinates: writes the target coordinates of the
/// lift as jets. Must be built from jet arithmetic only, so that its
/// derivatives are exact.
using MarkedMap = std::function<void(std::span<const Jet> w, const Jet& t, const Jet& tbar,
                                     std::span<Jet> out)>;

/// First and mixed second holomorphic derivatives of a real map at a point of
/// the total space, indices as in JetLayout (a <= n, a = n is t).
struct MapDerivs {
  int dim = 0;
  int n = 1;
  bool has_t = false;
  TPoint value;
  std::array<TCVec, kMaxHolo> d;                         // d f / d z^a
  std::array<std::array<TCVec, kMaxHolo>, kMaxHolo> dd;  // [b][a] = d^2 f / dzbar^b dz^a

  TCVec dbar(int a) const { return d[a].conjugate(); }
};

MapDerivs derivs_from_jets(std::span<const Jet> f, int n);

/// Second-order real Taylor data of a target coordinate in the variables
/// (w_0 .. w_{2n-1}, s, r) with t = s + i r. Derivatives that are unavailable
/// are zero.
struct RealTaylor {
  int nvars = 0;
  double value = 0.0;
  std::array<double, 2 * kMaxFiberDim + 2> grad{};
  std::array<std::array<double, 2 * kMaxFiberDim + 2>, 2 * kMaxFiberDim + 2> hess{};
};

/// Composes real Taylor data with the jets of (w, s, r) to produce a jet in the
/// complex variables. Exact second-order chain rule.
Jet compose_real_taylor(const RealTaylor& f, const MarkedJets& m, int n);

}  // namespace kahler::calc
