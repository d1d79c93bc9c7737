#include "kahler/calc/marked.hpp"

#include <sstream>

namespace kahler::calc {

cplx Polynomial::operator()(cplx t) const {
  cplx r{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * t + *it;
  return r;
}

cplx Polynomial::derivative(cplx t) const {
  cplx r{};
  for (std::size_t k = coeffs.size(); k-- > 1;) r = r * t + static_cast<double>(k) * coeffs[k];
  return r;
}

Polynomial Polynomial::derivative() const {
  std::vector<cplx> c;
  for (std::size_t k = 1; k < coeffs.size(); ++k) c.push_back(static_cast<double>(k) * coeffs[k]);
  if (c.empty()) c.push_back(0.0);
  return Polynomial(std::move(c));
}

Jet Polynomial::operator()(const Jet& t) const {
  Jet r;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * t + Jet(*it);
  return r;
}

Jet Polynomial::conj_eval(const Jet& tbar) const {
  Jet r;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * tbar + Jet(std::conj(*it));
  return r;
}

bool Polynomial::is_constant() const {
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (coeffs[k] != cplx{}) return false;
  }
  return true;
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k) os << ';';
    os << coeffs[k].real() << ',' << coeffs[k].imag();
  }
  return os.str();
}

namespace {

MarkedJets build(std::span<const double> w0, int n, const Jet& t, const Jet& tbar,
                 const std::function<Jet(int)>& lam, const std::function<Jet(int)>& lamb,
                 const std::function<cplx(int)>& lam0) {
  const JetLayout lay{n};
  MarkedJets m;
  m.t = t;
  m.tbar = tbar;
  for (int j = 0; j < n; ++j) {
    const cplx z0 = w0[2 * j] + lam0(j) * w0[2 * j + 1];
    const Jet z = Jet::variable(z0, j, lay.nvars());
    const Jet zb = Jet::variable(std::conj(z0), lay.bar(j), lay.nvars());
    const Jet l = lam(j);
    const Jet lb = lamb(j);
    m.w[2 * j + 1] = (z - zb) / (l - lb);
    m.w[2 * j] = z - l * m.w[2 * j + 1];
  }
  return m;
}

}  // namespace

MarkedJets marked_jets(std::span<const Polynomial> lambda, std::span<const double> w0, cplx t0) {
  const int n = static_cast<int>(lambda.size());
  const JetLayout lay{n};
  const Jet t = Jet::variable(t0, lay.t(), lay.nvars());
  const Jet tb = Jet::variable(std::conj(t0), lay.bar(lay.t()), lay.nvars());
  return build(
      w0, n, t, tb, [&](int j) { return lambda[j](t); },
      [&](int j) { return lambda[j].conj_eval(tb); }, [&](int j) { return lambda[j](t0); });
}

MarkedJets marked_jets(std::span<const cplx> lambda, std::span<const double> w0, cplx t0) {
  const int n = static_cast<int>(lambda.size());
  const JetLayout lay{n};
  const Jet t = Jet::variable(t0, lay.t(), lay.nvars());
  const Jet tb = Jet::variable(std::conj(t0), lay.bar(lay.t()), lay.nvars());
  return build(
      w0, n, t, tb, [&](int j) { return Jet(lambda[j]); },
      [&](int j) { return Jet(std::conj(lambda[j])); }, [&](int j) { return lambda[j]; });
}

MapDerivs derivs_from_jets(std::span<const Jet> f, int n) {
  const JetLayout lay{n};
  const int dim = static_cast<int>(f.size());
  MapDerivs r;
  r.dim = dim;
  r.n = n;
  r.has_t = true;
  r.value = TPoint(dim);
  for (int a = 0; a < lay.holo_count(); ++a) {
    r.d[a] = TCVec(dim);
    for (int b = 0; b < lay.holo_count(); ++b) r.dd[b][a] = TCVec(dim);
  }
  for (int k = 0; k < dim; ++k) {
    r.value(k) = f[k].value().real();
    for (int a = 0; a < lay.holo_count(); ++a) {
      r.d[a](k) = f[k].d(a);
      for (int b = 0; b < lay.holo_count(); ++b) r.dd[b][a](k) = f[k].d2(a, lay.bar(b));
    }
  }
  return r;
}

Jet compose_real_taylor(const RealTaylor& f, const MarkedJets& m, int n) {
  std::array<Jet, 2 * kMaxFiberDim + 2> du;
  for (int a = 0; a < 2 * n; ++a) du[a] = m.w[a] - Jet(m.w[a].value());
  const Jet dt = m.t - Jet(m.t.value());
  const Jet dtb = m.tbar - Jet(m.tbar.value());
  du[2 * n] = 0.5 * (dt + dtb);
  du[2 * n + 1] = (dt - dtb) * cplx(0.0, -0.5);
  const int nv = f.nvars;
  Jet r(f.value);
  for (int u = 0; u < nv; ++u) {
    if (f.grad[u] != 0.0) r += f.grad[u] * du[u];
  }
  for (int u = 0; u < nv; ++u) {
    for (int v = u; v < nv; ++v) {
      const double c = (u == v ? 0.5 : 1.0) * f.hess[u][v];
      if (c != 0.0) r += c * (du[u] * du[v]);
    }
  }
  return r;
}

}  // namespace kahler::calc
