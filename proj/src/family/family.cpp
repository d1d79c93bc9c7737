#include "kahler/family/family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kahler/core/errors.hpp"
#include "kahler/core/forms.hpp"
#include "kahler/core/numerics.hpp"
#include "kahler/geom/curvature.hpp"

namespace kahler::family {

using calc::FiberChart;
using calc::JetLayout;
using calc::MapDerivs;
using calc::MapField;

namespace {

std::string fmt_t(cplx t) {
  std::ostringstream os;
  os << "t = (" << t.real() << ", " << t.imag() << ")";
  return os.str();
}

// h(x, y) summed against P(alpha, beta) with the conjugate in the second slot
double paired_norm(const HMatrix& P, const TMatrix& h, std::span<const TCVec> x, int n) {
  cplx s{};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) s += P(a, b) * calc::hdot(h, x[a], x[b].conjugate());
  }
  return s.real();
}

}  // namespace

std::array<cplx, kMaxFiberDim> FamilySpec::moduli(cplx t) const {
  std::array<cplx, kMaxFiberDim> m{kI, kI};
  for (int j = 0; j < n; ++j) m[j] = lambda[j](t);
  return m;
}

void check_domain(const FamilySpec& spec, cplx t) {
  if (std::abs(t) >= spec.disk_radius) {
    throw DomainError(fmt_t(t) + " lies outside the disk of radius " +
                      std::to_string(spec.disk_radius));
  }
  const auto m = spec.moduli(t);
  for (int j = 0; j < spec.n; ++j) {
    if (!(m[j].imag() > 0.0)) {
      throw DomainError("modulus " + std::to_string(j) + " leaves the upper half-plane at " +
                        fmt_t(t));
    }
  }
}

FiberChart chart_at(const FamilySpec& spec, cplx t) {
  check_domain(spec, t);
  const auto m = spec.moduli(t);
  if (spec.n == 1) return FiberChart::torus(m[0], spec.grid_points());
  return FiberChart::product(m[0], m[1], spec.grid_points());
}

TotalMetric fiber_metric(const FamilySpec& spec, std::span<const double> w, cplx t) {
  const int n = spec.n;
  const JetLayout lay{n};
  const int nv = lay.nvars();
  const Jet tj = Jet::variable(t, lay.t(), nv);
  const Jet tb = Jet::variable(std::conj(t), lay.bar(lay.t()), nv);
  Jet phi = spec.C * (tj * tb);
  for (int j = 0; j < n; ++j) {
    const cplx z0 = w[2 * j] + spec.lambda[j](t) * w[2 * j + 1];
    const Jet z = Jet::variable(z0, j, nv);
    const Jet zb = Jet::variable(std::conj(z0), lay.bar(j), nv);
    const Jet s = (z - zb) * cplx(0.0, -0.5);
    const Jet y = (spec.lambda[j](tj) - spec.lambda[j].conj_eval(tb)) * cplx(0.0, -0.5);
    phi += (s * s) / y;
  }
  TotalMetric m;
  m.G = HMatrix(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) m.G(a, b) = phi.d2(a, lay.bar(b));
  }
  return m;
}

double ensure_positive(FamilySpec& spec, std::span<const cplx> t_samples) {
  const double c0 = spec.C;
  for (int doubling = 0; doubling <= 10; ++doubling) {
    bool ok = spec.C > 0.0;
    std::string witness;
    for (cplx t : t_samples) {
      if (!ok) break;
      const auto ch = chart_at(spec, t);
      for (std::size_t i = 0; i < ch.size() && ok; ++i) {
        const auto w = ch.marked(i);
        const HMatrix G = fiber_metric(spec, std::span<const double>(w.data(), ch.real_dim()), t).G;
        Eigen::SelfAdjointEigenSolver<HMatrix> es(G);
        const double lo = es.eigenvalues().minCoeff();
        if (!(lo > 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff())) {
          ok = false;
          std::ostringstream os;
          os << fmt_t(t) << ", w = (";
          for (int a = 0; a < ch.real_dim(); ++a) os << (a ? ", " : "") << w[a];
          os << "), smallest eigenvalue " << lo;
          witness = os.str();
        }
      }
    }
    if (ok) return spec.C;
    if (doubling == 10 || spec.C <= 0.0) {
      spec.C = c0;
      throw PositivityError("total-space metric is not positive at " +
                            (witness.empty() ? std::string("C <= 0") : witness));
    }
    spec.C *= 2.0;
  }
  return spec.C;
}

HorizontalLift horizontal_lift(const FamilySpec& spec, std::span<const double> w, cplx t) {
  const int n = spec.n;
  HorizontalLift r;
  r.G = fiber_metric(spec, w, t).G;
  const HMatrix g = r.G.topLeftCorner(n, n);
  const HMatrix P = inverse_metric(g);
  // sum_alpha a^alpha g_{alpha betabar} = -g_{t betabar}
  for (int al = 0; al < n; ++al) {
    cplx s{};
    for (int be = 0; be < n; ++be) s -= P(al, be) * r.G(n, be);
    r.a[al] = s;
  }
  for (int be = 0; be < n; ++be) {
    cplx s = r.G(n, be);
    for (int al = 0; al < n; ++al) s += r.a[al] * r.G(al, be);
    r.horizontality = std::max(r.horizontality, std::abs(s));
  }
  std::array<cplx, kMaxHolo> H{};
  for (int al = 0; al < n; ++al) H[al] = r.a[al];
  H[n] = 1.0;
  cplx psi{};
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) psi += H[a] * r.G(a, b) * std::conj(H[b]);
  }
  r.psi = psi.real();
  if (!(r.psi > 0.0)) throw PositivityError("|H|^2 <= 0 at " + fmt_t(t));

  // For this potential a^j = Im z_j lambda_j'(t) / Im lambda_j(t); its zbar
  // derivatives come from jets.
  const JetLayout lay{n};
  const int nv = lay.nvars();
  const Jet tj = Jet::variable(t, lay.t(), nv);
  const Jet tb = Jet::variable(std::conj(t), lay.bar(lay.t()), nv);
  for (int j = 0; j < n; ++j) {
    const cplx z0 = w[2 * j] + spec.lambda[j](t) * w[2 * j + 1];
    const Jet z = Jet::variable(z0, j, nv);
    const Jet zb = Jet::variable(std::conj(z0), lay.bar(j), nv);
    const Jet s = (z - zb) * cplx(0.0, -0.5);
    const Jet y = (spec.lambda[j](tj) - spec.lambda[j].conj_eval(tb)) * cplx(0.0, -0.5);
    const Jet aj = s * spec.lambda[j].derivative()(tj) / y;
    for (int be = 0; be < n; ++be) r.A[j][be] = aj.d(lay.bar(be));
  }
  return r;
}

KodairaSpencer kodaira_spencer(const FamilySpec& spec, cplx t) {
  const auto ch = chart_at(spec, t);
  const int n = spec.n;
  KodairaSpencer ks;
  ks.A.resize(ch.size());
  std::array<std::array<CompensatedSum, kMaxFiberDim>, kMaxFiberDim> re, im;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto w = ch.marked(i);
    ks.A[i] = horizontal_lift(spec, std::span<const double>(w.data(), ch.real_dim()), t).A;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        re[a][b].add(ks.A[i][a][b].real());
        im[a][b].add(ks.A[i][a][b].imag());
      }
    }
  }
  const double cnt = static_cast<double>(ch.size());
  const HMatrix g = ch.metric();
  const HMatrix P = inverse_metric(g);
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      ks.mean[a][b] = cplx(re[a][b].value(), im[a][b].value()) / cnt;
      s += std::norm(ks.mean[a][b]) * g(a, a).real() * P(b, b).real();
    }
  }
  ks.mean_norm = std::sqrt(s);
  return ks;
}

MapField fiber_map(const FamilySpec& spec, cplx t) {
  const auto ch = chart_at(spec, t);
  if (spec.map) return calc::sample_map(spec.target, ch, spec.map, spec.shifts, t);
  if (!spec.fiber_map) throw InvalidInputError("family has neither a map closure nor fiber maps");
  MapField m = spec.fiber_map(t, ch);
  m.t0 = t;
  return m;
}

Fiber build_fiber(const FamilySpec& spec, cplx t0) {
  Fiber fb;
  fb.t0 = t0;
  fb.chart = chart_at(spec, t0);
  fb.map = fiber_map(spec, t0);
  const int n = spec.n;
  const int rd = 2 * n;
  const int dim = spec.target->dim;
  const auto polys = spec.moduli_polys();
  fb.f.resize(fb.chart.size());
  fb.lift.resize(fb.chart.size());

  std::vector<MapField> ring;  // +d, -d, +id, -id, +d+id, +d-id, -d+id, -d-id
  const double d = spec.t_step;
  if (!spec.map) {
    for (cplx o : {cplx(d, 0), cplx(-d, 0), cplx(0, d), cplx(0, -d), cplx(d, d), cplx(d, -d),
                   cplx(-d, d), cplx(-d, -d)}) {
      ring.push_back(fiber_map(spec, t0 + o));
    }
  }

  for (std::size_t i = 0; i < fb.chart.size(); ++i) {
    const auto w = fb.chart.marked(i);
    const std::span<const double> ws(w.data(), rd);
    const calc::MarkedJets mj = calc::marked_jets(polys, ws, t0);
    std::array<Jet, kMaxTargetDim> out;
    if (spec.map) {
      spec.map(std::span<const Jet>(mj.w.data(), rd), mj.t, mj.tbar,
               std::span<Jet>(out.data(), dim));
    } else {
      const int s = rd, r = rd + 1;
      for (int k = 0; k < dim; ++k) {
        calc::RealTaylor rt = calc::grid_taylor(fb.map, i, k);
        auto val = [&](int j) { return ring[j].lift[i * dim + k]; };
        const double c = rt.value;
        rt.grad[s] = (val(0) - val(1)) / (2 * d);
        rt.grad[r] = (val(2) - val(3)) / (2 * d);
        rt.hess[s][s] = (val(0) - 2 * c + val(1)) / (d * d);
        rt.hess[r][r] = (val(2) - 2 * c + val(3)) / (d * d);
        rt.hess[s][r] = rt.hess[r][s] = (val(4) - val(5) - val(6) + val(7)) / (4 * d * d);
        const calc::RealTaylor ps = calc::grid_taylor(ring[0], i, k);
        const calc::RealTaylor ms = calc::grid_taylor(ring[1], i, k);
        const calc::RealTaylor pr = calc::grid_taylor(ring[2], i, k);
        const calc::RealTaylor mr = calc::grid_taylor(ring[3], i, k);
        for (int a = 0; a < rd; ++a) {
          rt.hess[a][s] = rt.hess[s][a] = (ps.grad[a] - ms.grad[a]) / (2 * d);
          rt.hess[a][r] = rt.hess[r][a] = (pr.grad[a] - mr.grad[a]) / (2 * d);
        }
        out[k] = calc::compose_real_taylor(rt, mj, n);
      }
    }
    fb.f[i] = calc::derivs_from_jets(std::span<const Jet>(out.data(), dim), n);
    fb.lift[i] = horizontal_lift(spec, ws, t0);
  }
  return fb;
}

DiskSample energy_at(const FamilySpec& spec, cplx t) {
  const auto eb = calc::energy(fiber_map(spec, t), calc::KMode::kIfAvailable);
  DiskSample s;
  s.t = t;
  s.E = eb.E;
  s.E1 = eb.E_prime;
  s.E2 = eb.E_doubleprime;
  s.K = eb.K;
  s.K_form = eb.K_form;
  return s;
}

std::vector<DiskSample> energy_over_disk(const FamilySpec& spec, std::span<const cplx> t_samples) {
  std::vector<DiskSample> out;
  out.reserve(t_samples.size());
  for (cplx t : t_samples) out.push_back(energy_at(spec, t));
  return out;
}

double pluriharmonic_residual(const FamilySpec& spec, const Fiber& fiber) {
  const int n = spec.n;
  double sup = 0.0;
  for (std::size_t i = 0; i < fiber.f.size(); ++i) {
    const auto& f = fiber.f[i];
    const auto gamma = geom::christoffel(*spec.target, f.value);
    const auto T = calc::second_fundamental_at(f, gamma, n);
    const HMatrix g = fiber.lift[i].G.topLeftCorner(n, n);
    sup = std::max(sup, std::sqrt(calc::hs_norm2(T, g, spec.target->h(f.value))));
  }
  return sup;
}

namespace {

// Pointwise quantities shared by the Levi, F and strictness computations.
struct PointData {
  HMatrix g, P;
  std::array<cplx, kMaxHolo> H{};
  TCVec fH;
  std::array<TCVec, kMaxFiberDim> X;  // D_Hbar f_*d_alpha
  calc::SecondFundamental T;          // full (n+1) indices
  TMatrix h;
  geom::Tensor4 riem;
  bool flat = false;
};

PointData point_data(const FamilySpec& spec, const Fiber& fb, std::size_t i) {
  const int n = spec.n;
  const auto& f = fb.f[i];
  const auto& L = fb.lift[i];
  PointData pd;
  pd.g = L.G.topLeftCorner(n, n);
  pd.P = inverse_metric(pd.g);
  for (int a = 0; a < n; ++a) pd.H[a] = L.a[a];
  pd.H[n] = 1.0;
  pd.h = spec.target->h(f.value);
  pd.flat = spec.target->flat;
  const auto gamma = geom::christoffel(*spec.target, f.value);
  pd.T = calc::second_fundamental_at(f, gamma, n + 1);
  pd.fH = TCVec::Zero(f.dim);
  for (int b = 0; b <= n; ++b) pd.fH += pd.H[b] * f.d[b];
  for (int al = 0; al < n; ++al) {
    pd.X[al] = TCVec::Zero(f.dim);
    for (int b = 0; b <= n; ++b) pd.X[al] += std::conj(pd.H[b]) * pd.T.T[b][al];
  }
  if (!pd.flat) pd.riem = geom::riemann(*spec.target, f.value).riem_lowered;
  return pd;
}

double curvature_integrand(const PointData& pd, const MapDerivs& f, int n) {
  if (pd.flat) return 0.0;
  cplx s{};
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      s += pd.P(a, b) *
           geom::curvature_form(pd.riem, f.d[a], pd.fH, f.dbar(b), pd.fH.conjugate());
    }
  }
  return -2.0 * s.real();
}

}  // namespace

LeviTerms levi_terms(const FamilySpec& spec, const Fiber& fb) {
  const int n = spec.n;
  CompensatedSum curv, norm;
  const double wgt = fb.chart.cell_weight();
  for (std::size_t i = 0; i < fb.f.size(); ++i) {
    const PointData pd = point_data(spec, fb, i);
    curv.add(wgt * curvature_integrand(pd, fb.f[i], n));
    norm.add(wgt * 2.0 * paired_norm(pd.P, pd.h, pd.X, n));
  }
  return {curv.value(), norm.value()};
}

double levi_stencil(const FamilySpec& spec, cplx t0, double delta, double* E0, cplx* dE) {
  if (!(delta > 0.0)) throw InvalidInputError("stencil_delta must be positive");
  if (std::abs(t0) + delta >= spec.disk_radius) {
    throw DomainError("Levi stencil around " + fmt_t(t0) + " with delta " +
                      std::to_string(delta) + " leaves the disk");
  }
  const double e0 = energy_at(spec, t0).E;
  const double ep = energy_at(spec, t0 + delta).E;
  const double em = energy_at(spec, t0 - delta).E;
  const double eip = energy_at(spec, t0 + cplx(0, delta)).E;
  const double eim = energy_at(spec, t0 - cplx(0, delta)).E;
  if (E0) *E0 = e0;
  if (dE) *dE = 0.5 * cplx((ep - em) / (2 * delta), -(eip - eim) / (2 * delta));
  return (ep + em + eip + eim - 4.0 * e0) / (4.0 * delta * delta);
}

void strictness_diagnostics(const FamilySpec& spec, const Fiber& fb, LeviReport& rep,
                            bool request_class) {
  if (request_class && !spec.target->flat) {
    throw UnsupportedProjectionError("class representative needs a flat target, got " +
                                     spec.target->name);
  }
  const int n = spec.n;
  const int dim = spec.target->dim;
  const auto& ch = fb.chart;
  const std::size_t npts = ch.size();
  const double wgt = ch.cell_weight();

  // f_*H on the grid, differentiated along the fiber below
  std::vector<TCVec> U(npts);
  std::vector<PointData> pds;
  pds.reserve(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    pds.push_back(point_data(spec, fb, i));
    U[i] = pds.back().fH;
  }
  CompensatedSum s_strict, s_phiA, s_nabla, s_diff;
  std::array<TCVec, kMaxFiberDim> mean;
  for (auto& m : mean) m = TCVec::Zero(dim);
  const double h = ch.spacing();
  for (std::size_t i = 0; i < npts; ++i) {
    const auto& pd = pds[i];
    const auto& f = fb.f[i];
    const auto& L = fb.lift[i];
    const auto c = ch.unravel(i);
    std::array<TCVec, kMaxFiberDim> V, phiA, nab, diff;
    const auto gamma = geom::christoffel(*spec.target, f.value);
    for (int be = 0; be < n; ++be) {
      V[be] = pd.X[be].conjugate();  // D_H f_*d_betabar
      phiA[be] = TCVec::Zero(dim);
      for (int al = 0; al < n; ++al) phiA[be] += L.A[al][be] * f.d[al];
      // d/dzbar^beta of f_*H by periodic 4th-order stencils
      TCVec dU = TCVec::Zero(dim);
      for (int a = 2 * be; a < 2 * be + 2; ++a) {
        TCVec da = TCVec::Zero(dim);
        for (int o = -2; o <= 2; ++o) {
          if (o == 0) continue;
          auto cc = c;
          cc[a] += o;
          da += calc::kD1[o + 2] * U[ch.ravel(cc)];
        }
        dU += std::conj(ch.dz_coeff(be, a)) * da / h;
      }
      nab[be] = dU + gamma.contract(f.dbar(be), pd.fH);
      diff[be] = nab[be] - phiA[be];
      mean[be] += wgt * phiA[be];
    }
    s_strict.add(wgt * paired_norm(pd.P, pd.h, V, n));
    s_phiA.add(wgt * paired_norm(pd.P, pd.h, phiA, n));
    s_nabla.add(wgt * paired_norm(pd.P, pd.h, nab, n));
    s_diff.add(wgt * paired_norm(pd.P, pd.h, diff, n));
  }
  // paired_norm puts the conjugate on the second slot; for V the roles swap,
  // which leaves the value unchanged for Hermitian P.
  rep.strictness = std::sqrt(std::max(0.0, s_strict.value()));
  rep.strictness_identity = std::abs(2.0 * s_strict.value() - rep.norm_term);
  rep.phiA_norm = std::sqrt(std::max(0.0, s_phiA.value()));
  rep.nabla_fH_norm = std::sqrt(std::max(0.0, s_nabla.value()));
  rep.phiA_minus_nabla = std::sqrt(std::max(0.0, s_diff.value()));
  if (request_class) {
    double vol = wgt * static_cast<double>(npts);
    for (auto& m : mean) m /= vol;
    const HMatrix P = inverse_metric(ch.metric());
    const TMatrix h0 = spec.target->h(fb.f[0].value);
    rep.class_average = std::sqrt(std::max(0.0, paired_norm(P, h0, mean, n)));
    rep.class_predicts_strict = *rep.class_average > kClassMargin;
    rep.prediction_confirmed = !*rep.class_predicts_strict || rep.levi_formula > kClassMargin;
  }
}

LeviReport levi_form(const FamilySpec& spec, cplx t0, double stencil_delta,
                     std::function<double(cplx)> oracle) {
  LeviReport rep;
  rep.t0 = t0;
  rep.stencil_delta = stencil_delta;
  if (std::abs(t0) + stencil_delta >= spec.disk_radius) {
    throw DomainError("Levi stencil around " + fmt_t(t0) + " leaves the disk");
  }
  const Fiber fb = build_fiber(spec, t0);
  rep.pluriharmonic_residual = pluriharmonic_residual(spec, fb);
  if (rep.pluriharmonic_residual > spec.gate) {
    std::ostringstream os;
    os << "phi at " << fmt_t(t0) << " is not pluriharmonic: sup |D''d phi| = "
       << rep.pluriharmonic_residual << " > " << spec.gate;
    throw PreconditionError(os.str(), rep.pluriharmonic_residual);
  }
  const LeviTerms lt = levi_terms(spec, fb);
  rep.curvature_term = lt.curvature_term;
  rep.norm_term = lt.norm_term;
  rep.levi_formula = lt.curvature_term + lt.norm_term;
  rep.levi_stencil = levi_stencil(spec, t0, stencil_delta, &rep.E, &rep.dE_dt);
  rep.residual_formula_stencil = std::abs(rep.levi_formula - rep.levi_stencil);
  if (oracle) {
    rep.levi_oracle = oracle(t0);
    rep.residual_formula_oracle = std::abs(rep.levi_formula - *rep.levi_oracle);
    rep.residual_stencil_oracle = std::abs(rep.levi_stencil - *rep.levi_oracle);
  }
  strictness_diagnostics(spec, fb, rep, spec.target->flat);
  return rep;
}

FStructure f_structure_check(const FamilySpec& spec, cplx t0, bool override_gate) {
  const int n = spec.n;
  const Fiber fb = build_fiber(spec, t0);
  FStructure out;
  out.pluriharmonic_residual = pluriharmonic_residual(spec, fb);
  if (!override_gate && out.pluriharmonic_residual > spec.gate) {
    std::ostringstream os;
    os << "phi at " << fmt_t(t0) << " is not pluriharmonic: sup |D''d phi| = "
       << out.pluriharmonic_residual;
    throw PreconditionError(os.str(), out.pluriharmonic_residual);
  }
  for (std::size_t i = 0; i < fb.f.size(); ++i) {
    const PointData pd = point_data(spec, fb, i);
    const auto& f = fb.f[i];
    const double psi = fb.lift[i].psi;
    const auto& T = pd.T.T;
    std::array<double, 6> t{};
    cplx t1{}, t3{};
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) {
            const cplx pp = pd.P(a, b) * pd.P(c, d);
            if (!pd.flat) t1 -= pp * geom::curvature_form(pd.riem, f.d[a], f.d[c], f.dbar(b), f.dbar(d));
            t3 += pp * calc::hdot(pd.h, T[d][a], T[c][b].conjugate());
          }
        }
      }
    }
    t[0] = t1.real();
    t[1] = curvature_integrand(pd, f, n) / psi;
    t[2] = t3.real();
    t[3] = 2.0 * paired_norm(pd.P, pd.h, pd.X, n) / psi;
    TCVec thh = TCVec::Zero(f.dim);
    for (int b = 0; b <= n; ++b) {
      for (int a = 0; a <= n; ++a) thh += std::conj(pd.H[b]) * pd.H[a] * T[b][a];
    }
    t[4] = calc::hnorm2(pd.h, thh) / (psi * psi);
    TCVec tr = TCVec::Zero(f.dim);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) tr += pd.P(a, b) * T[b][a];
    }
    t[5] = -calc::hnorm2(pd.h, tr + thh / psi);
    double F = 0.0;
    for (int k = 0; k < 6; ++k) {
      out.max_abs[k] = std::max(out.max_abs[k], std::abs(t[k]));
      F += t[k];
    }
    out.cancel_56 = std::max(out.cancel_56, std::abs(t[4] + t[5]));
    out.reduced_vs_full = std::max(out.reduced_vs_full, std::abs(F - t[1] - t[3]));
    geom::Tensor4 riem{};
    if (!pd.flat) riem = pd.riem;
    const auto bt = calc::bochner_terms(f, pd.T, fb.lift[i].G, pd.h, riem, n + 1);
    out.total_vs_bochner = std::max(out.total_vs_bochner, std::abs(F - bt.rhs()));
  }
  return out;
}

VolumeIdentity volume_identity_residual(const FamilySpec& spec, cplx t0) {
  const int n = spec.n;
  const auto ch = chart_at(spec, t0);
  const int nb = 2 * (n + 1);
  const Form dtdtb =
      Form::basis(nb, Form::holo(n)).wedge(Form::basis(nb, Form::antiholo(n)));
  VolumeIdentity v;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto w = ch.marked(i);
    const auto L = horizontal_lift(spec, std::span<const double>(w.data(), ch.real_dim()), t0);
    const Form omega = hermitian_two_form(L.G);
    const cplx lhs = omega.power_over_factorial(n + 1).top();
    const cplx rhs = ((kI * L.psi) * dtdtb).wedge(omega.power_over_factorial(n)).top();
    v.max_residual = std::max(v.max_residual, std::abs(lhs - rhs));
    v.max_value = std::max(v.max_value, std::abs(lhs));
  }
  return v;
}

}  // namespace kahler::family
