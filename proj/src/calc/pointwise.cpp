#include "kahler/calc/pointwise.hpp"

#include "kahler/core/forms.hpp"
#include "kahler/core/numerics.hpp"

namespace kahler::calc {

SecondFundamental second_fundamental_at(const MapDerivs& f, const geom::Christoffel& gamma,
                                        int m) {
  SecondFundamental s;
  s.m = m;
  for (int b = 0; b < m; ++b) {
    const TCVec fb = f.dbar(b);
    for (int a = 0; a < m; ++a) s.T[b][a] = f.dd[b][a] + gamma.contract(fb, f.d[a]);
  }
  return s;
}

HMatrix epsilon_at(const MapDerivs& f, const TMatrix& h, int m) {
  HMatrix e(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) e(a, b) = hdot(h, f.d[a], f.dbar(b));
  }
  return e;
}

double energy_density(const HMatrix& eps, const HMatrix& ginv) {
  cplx s{};
  for (int a = 0; a < eps.rows(); ++a) {
    for (int b = 0; b < eps.cols(); ++b) s += ginv(a, b) * eps(a, b);
  }
  return s.real();
}

SplitDensity split_density(const MapDerivs& f, const TMatrix& h, const TMatrix& J,
                           const HMatrix& ginv, int m) {
  const auto Jc = J.cast<cplx>();
  std::array<TCVec, kMaxHolo> p, q;
  for (int a = 0; a < m; ++a) {
    const TCVec jv = Jc * f.d[a];
    p[a] = 0.5 * (f.d[a] - kI * jv);
    q[a] = 0.5 * (f.d[a] + kI * jv);
  }
  SplitDensity s;
  cplx e1{}, e2{};
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      e1 += ginv(a, b) * hdot(h, p[a], p[b].conjugate());
      e2 += ginv(a, b) * hdot(h, q[a], q[b].conjugate());
    }
  }
  s.e1 = e1.real();
  s.e2 = e2.real();
  return s;
}

double kahler_pullback_density(const MapDerivs& f, const TMatrix& h, const TMatrix& J,
                               const HMatrix& g, int m) {
  const int nb = 2 * m;
  // push-forwards of the coordinate vectors dual to dz^a, dzbar^a
  std::array<TCVec, 2 * kMaxHolo> v;
  for (int a = 0; a < m; ++a) {
    v[Form::holo(a)] = f.d[a];
    v[Form::antiholo(a)] = f.dbar(a);
  }
  const TMatrix hJ = J.transpose() * h;  // omega_N(X, Y) = X^T J^T h Y
  Form pull(nb);
  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      const cplx c = hdot(hJ, v[i], v[j]);
      pull += c * Form::basis(nb, i).wedge(Form::basis(nb, j));
    }
  }
  const Form omega = hermitian_two_form(g);
  const Form lhs = pull.wedge(omega.power_over_factorial(m - 1));
  return (lhs.top() / omega.power_over_factorial(m).top()).real();
}

TCVec trace(const SecondFundamental& T, const HMatrix& ginv) {
  TCVec tr = TCVec::Zero(T.T[0][0].size());
  for (int a = 0; a < T.m; ++a) {
    for (int b = 0; b < T.m; ++b) tr += ginv(a, b) * T.T[b][a];
  }
  return tr;
}

double hs_norm2(const SecondFundamental& T, const HMatrix& g, const TMatrix& h) {
  const HMatrix E = unitary_frame(g);
  const int m = T.m;
  double s = 0.0;
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      TCVec tf = TCVec::Zero(T.T[0][0].size());
      for (int nu = 0; nu < m; ++nu) {
        for (int mu = 0; mu < m; ++mu) tf += std::conj(E(nu, b)) * E(mu, a) * T.T[nu][mu];
      }
      s += hnorm2(h, tf);
    }
  }
  return s;
}

BochnerTerms bochner_terms(const MapDerivs& f, const SecondFundamental& T, const HMatrix& g,
                           const TMatrix& h, const geom::Tensor4& riem, int m) {
  const HMatrix E = unitary_frame(g);
  const int dim = f.dim;
  std::array<TCVec, kMaxHolo> X;
  for (int a = 0; a < m; ++a) {
    X[a] = TCVec::Zero(dim);
    for (int mu = 0; mu < m; ++mu) X[a] += E(mu, a) * f.d[mu];
  }
  BochnerTerms out;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) out.curvature -= geom::complexified_quadform(riem, X[a], X[b]);
  }
  TCVec tr = TCVec::Zero(dim);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) {
      TCVec tf = TCVec::Zero(dim);
      for (int nu = 0; nu < m; ++nu) {
        for (int mu = 0; mu < m; ++mu) tf += std::conj(E(nu, b)) * E(mu, a) * T.T[nu][mu];
      }
      out.hs += hnorm2(h, tf);
      if (a == b) tr += tf;
    }
  }
  out.trace = hnorm2(h, tr);
  return out;
}

double bochner_lhs_density(const std::array<std::array<HMatrix, kMaxHolo>, kMaxHolo>& dde,
                           const HMatrix& g) {
  const int m = static_cast<int>(g.rows());
  if (m < 2) return 0.0;
  const int nb = 2 * m;
  Form ddeps(nb);
  for (int c = 0; c < m; ++c) {
    for (int d = 0; d < m; ++d) {
      const Form cd = Form::basis(nb, Form::holo(c)).wedge(Form::basis(nb, Form::antiholo(d)));
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const cplx coef = dde[c][d](a, b);
          if (coef == cplx{}) continue;
          const Form ab =
              Form::basis(nb, Form::holo(a)).wedge(Form::basis(nb, Form::antiholo(b)));
          ddeps += (kI * coef) * cd.wedge(ab);
        }
      }
    }
  }
  const Form omega = hermitian_two_form(g);
  const Form lhs = (kI * cplx(1.0)) * ddeps.wedge(omega.power_over_factorial(m - 2));
  return (lhs.top() / omega.power_over_factorial(m).top()).real();
}

}  // namespace kahler::calc
