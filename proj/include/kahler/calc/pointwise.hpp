#pragma once

#include <array>

#include "kahler/calc/marked.hpp"
#include "kahler/core/types.hpp"
#include "kahler/geom/curvature.hpp"

namespace kahler::calc {

/// Complex bilinear h(x, y).
inline cplx hdot(const TMatrix& h, const TCVec& x, const TCVec& y) {
  return geom::bilinear(h, x, y);
}
/// |x|_h^2 = h(x, conj x).
inline double hnorm2(const TMatrix& h, const TCVec& x) {
  return hdot(h, x, x.conjugate()).real();
}

/// Second fundamental data at one point over the first m holomorphic indices:
/// T[b][a] = (D''d f)(d/dzbar^b, d/dz^a) = d_bbar d_a f + Gamma(d_bbar f, d_a f).
struct SecondFundamental {
  int m = 0;
  std::array<std::array<TCVec, kMaxHolo>, kMaxHolo> T;
};
SecondFundamental second_fundamental_at(const MapDerivs& f, const geom::Christoffel& gamma,
                                        int m);

/// epsilon_{a bbar} = h(f_a, f_bbar) over the first m holomorphic indices.
HMatrix epsilon_at(const MapDerivs& f, const TMatrix& h, int m);

/// Energy density <epsilon, omega> = g^{a bbar} epsilon_{a bbar}.
double energy_density(const HMatrix& eps, const HMatrix& ginv);

/// (1,0) / (0,1) split of df relative to the complex structure J of the target:
/// e' uses (1/2)(V - iJV), e'' uses (1/2)(V + iJV).
struct SplitDensity {
  double e1 = 0.0;
  double e2 = 0.0;
};
SplitDensity split_density(const MapDerivs& f, const TMatrix& h, const TMatrix& J,
                           const HMatrix& ginv, int m);

/// Density of phi^* omega_N ^ omega^{m-1}/(m-1)! relative to omega^m/m!,
/// computed in the exterior algebra, with omega_N(X, Y) = h(JX, Y).
double kahler_pullback_density(const MapDerivs& f, const TMatrix& h, const TMatrix& J,
                               const HMatrix& g, int m);

/// g-trace of T: sum g^{a bbar} T[b][a].
TCVec trace(const SecondFundamental& T, const HMatrix& ginv);

/// |T|^2 (Hilbert-Schmidt, unitary frame of g) over the first T.m indices.
double hs_norm2(const SecondFundamental& T, const HMatrix& g, const TMatrix& h);

/// Terms of the contracted Bochner identity in a unitary frame of g.
struct BochnerTerms {
  double curvature = 0.0;  // -sum R(f Z_a, f Z_b, conj, conj)
  double hs = 0.0;         // |D''d f|^2 (Hilbert-Schmidt)
  double trace = 0.0;      // |tr_g D''d f|^2
  double rhs() const { return curvature + hs - trace; }
};
BochnerTerms bochner_terms(const MapDerivs& f, const SecondFundamental& T, const HMatrix& g,
                           const TMatrix& h, const geom::Tensor4& riem, int m);

/// Coefficient of i d dbar epsilon ^ omega^{m-2}/(m-2)! relative to
/// omega^m/m!, given dde[c][d](a, b) = d_c d_dbar epsilon_{a bbar}. Zero for
/// m < 2 where the form vanishes identically.
double bochner_lhs_density(const std::array<std::array<HMatrix, kMaxHolo>, kMaxHolo>& dde,
                           const HMatrix& g);

}  // namespace kahler::calc
