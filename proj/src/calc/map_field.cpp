#include "kahler/calc/map_field.hpp"

#include <cmath>

#include "kahler/core/errors.hpp"

namespace kahler::calc {

FiberChart FiberChart::torus(cplx lambda, int N) {
  if (!(lambda.imag() > 0.0)) throw DomainError("torus modulus must lie in the upper half-plane");
  FiberChart c;
  c.n = 1;
  c.N = N;
  c.lambda = {lambda, lambda};
  return c;
}

FiberChart FiberChart::product(cplx lambda1, cplx lambda2, int N) {
  if (!(lambda1.imag() > 0.0) || !(lambda2.imag() > 0.0)) {
    throw DomainError("torus modulus must lie in the upper half-plane");
  }
  FiberChart c;
  c.n = 2;
  c.N = N;
  c.lambda = {lambda1, lambda2};
  return c;
}

std::size_t FiberChart::size() const {
  std::size_t s = 1;
  for (int a = 0; a < real_dim(); ++a) s *= static_cast<std::size_t>(N);
  return s;
}

std::array<int, 2 * kMaxFiberDim> FiberChart::unravel(std::size_t idx) const {
  std::array<int, 2 * kMaxFiberDim> c{};
  for (int a = real_dim() - 1; a >= 0; --a) {
    c[a] = static_cast<int>(idx % static_cast<std::size_t>(N));
    idx /= static_cast<std::size_t>(N);
  }
  return c;
}

std::size_t FiberChart::ravel(std::array<int, 2 * kMaxFiberDim> c) const {
  std::size_t idx = 0;
  for (int a = 0; a < real_dim(); ++a) {
    int v = c[a] % N;
    if (v < 0) v += N;
    idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(v);
  }
  return idx;
}

std::array<double, 2 * kMaxFiberDim> FiberChart::marked(std::size_t idx) const {
  const auto c = unravel(idx);
  std::array<double, 2 * kMaxFiberDim> w{};
  for (int a = 0; a < real_dim(); ++a) w[a] = c[a] * spacing();
  return w;
}

HMatrix FiberChart::metric(std::size_t) const {
  HMatrix g = HMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) g(j, j) = scale / (2.0 * lambda[j].imag());
  return g;
}

double FiberChart::volume_density() const { return std::pow(scale, n); }

double FiberChart::cell_weight() const {
  return volume_density() * std::pow(spacing(), real_dim());
}

cplx FiberChart::dz_coeff(int alpha, int a) const {
  if (a / 2 != alpha) return {};
  return dw_dz(lambda[alpha])[a % 2];
}

Eigen::MatrixXd FiberChart::inverse_metric_w() const {
  // Riemannian metric (1/y)|dz|^2 per factor in w-coordinates, times scale
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(real_dim(), real_dim());
  for (int j = 0; j < n; ++j) {
    const double x = lambda[j].real(), y = lambda[j].imag();
    q(2 * j, 2 * j) = std::norm(lambda[j]) / y;
    q(2 * j, 2 * j + 1) = q(2 * j + 1, 2 * j) = -x / y;
    q(2 * j + 1, 2 * j + 1) = 1.0 / y;
  }
  return q / scale;
}

TPoint MapField::at(std::size_t idx) const {
  const int d = dim();
  TPoint p(d);
  for (int k = 0; k < d; ++k) p(k) = lift[idx * d + k];
  return p;
}

double MapField::wrapped(std::array<int, 2 * kMaxFiberDim> c, int k) const {
  const int N = chart.N;
  double shift = 0.0;
  for (int a = 0; a < chart.real_dim(); ++a) {
    const int q = (c[a] >= 0) ? c[a] / N : -((-c[a] + N - 1) / N);
    if (q != 0) shift += q * shifts[a](k);
  }
  return lift[chart.ravel(c) * dim() + k] + shift;
}

std::array<TPoint, 2 * kMaxFiberDim> zero_shifts(int dim) {
  std::array<TPoint, 2 * kMaxFiberDim> s;
  for (auto& v : s) v = TPoint::Zero(dim);
  return s;
}

MapDerivs evaluate_analytic(const MarkedMap& f, int dim, std::span<const cplx> moduli,
                            std::span<const double> w, cplx t0) {
  const int n = static_cast<int>(moduli.size());
  const MarkedJets m = marked_jets(moduli, w, t0);
  std::array<Jet, kMaxTargetDim> out;
  f(std::span<const Jet>(m.w.data(), 2 * n), m.t, m.tbar, std::span<Jet>(out.data(), dim));
  return derivs_from_jets(std::span<const Jet>(out.data(), dim), n);
}

MapField sample_map(geom::TargetPtr target, const FiberChart& chart, MarkedMap map,
                    std::array<TPoint, 2 * kMaxFiberDim> shifts, cplx t0) {
  MapField m;
  m.target = std::move(target);
  m.chart = chart;
  m.shifts = std::move(shifts);
  m.analytic = std::move(map);
  m.t0 = t0;
  const int d = m.dim();
  m.lift.resize(chart.size() * d);
  std::array<Jet, 2 * kMaxFiberDim> w;
  std::array<Jet, kMaxTargetDim> out;
  for (std::size_t i = 0; i < chart.size(); ++i) {
    const auto wm = chart.marked(i);
    for (int a = 0; a < chart.real_dim(); ++a) w[a] = Jet(wm[a]);
    m.analytic(std::span<const Jet>(w.data(), chart.real_dim()), Jet(t0), Jet(std::conj(t0)),
               std::span<Jet>(out.data(), d));
    for (int k = 0; k < d; ++k) m.lift[i * d + k] = out[k].value().real();
  }
  return m;
}

void check_periodicity(const MapField& map, double tol) {
  const auto& ch = map.chart;
  const int d = map.dim();
  const int rd = ch.real_dim();
  if (map.analytic) {
    std::array<Jet, 2 * kMaxFiberDim> w, w2;
    std::array<Jet, kMaxTargetDim> o1, o2;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const auto c = ch.unravel(i);
      const auto wm = ch.marked(i);
      for (int a = 0; a < rd; ++a) {
        if (c[a] != 0) continue;  // boundary pairs w_a = 0 <-> w_a = 1
        for (int b = 0; b < rd; ++b) {
          w[b] = Jet(wm[b]);
          w2[b] = Jet(wm[b] + (a == b ? 1.0 : 0.0));
        }
        map.analytic(std::span<const Jet>(w.data(), rd), Jet(map.t0), Jet(std::conj(map.t0)),
                     std::span<Jet>(o1.data(), d));
        map.analytic(std::span<const Jet>(w2.data(), rd), Jet(map.t0), Jet(std::conj(map.t0)),
                     std::span<Jet>(o2.data(), d));
        for (int k = 0; k < d; ++k) {
          const double jump = (o2[k] - o1[k]).value().real() - map.shifts[a](k);
          if (std::abs(jump) > tol) {
            throw BoundaryMismatchError("lift is not periodic along w" + std::to_string(a) +
                                        " (mismatch " + std::to_string(jump) + ")");
          }
        }
      }
    }
    return;
  }
  // Grid lift: the jump across the seam must look like an interior increment.
  for (std::size_t i = 0; i < ch.size(); ++i) {
    auto c = ch.unravel(i);
    for (int a = 0; a < rd; ++a) {
      if (c[a] != 0) continue;
      for (int k = 0; k < d; ++k) {
        auto at = [&](int off) {
          auto cc = c;
          cc[a] += off;
          return map.wrapped(cc, k);
        };
        // second differences straddling the seam vs. interior ones
        const double seam = std::abs(at(-2) - 2 * at(-1) + at(0)) +
                            std::abs(at(-1) - 2 * at(0) + at(1));
        const double inner = std::abs(at(1) - 2 * at(2) + at(3)) +
                             std::abs(at(-4) - 2 * at(-3) + at(-2));
        if (seam > 8.0 * inner + tol) {
          throw BoundaryMismatchError("lift is not periodic along w" + std::to_string(a) +
                                      " (seam second difference " + std::to_string(seam) + ")");
        }
      }
    }
  }
}

RealTaylor grid_taylor(const MapField& map, std::size_t idx, int k) {
  const auto& ch = map.chart;
  const int rd = ch.real_dim();
  const double h = ch.spacing();
  const auto c = ch.unravel(idx);
  RealTaylor r;
  r.nvars = rd + 2;
  r.value = map.lift[idx * map.dim() + k];
  auto at = [&](int a, int oa, int b, int ob) {
    auto cc = c;
    cc[a] += oa;
    cc[b] += ob;
    return map.wrapped(cc, k);
  };
  for (int a = 0; a < rd; ++a) {
    double g = 0.0, s = 0.0;
    for (int o = -2; o <= 2; ++o) {
      const double v = at(a, o, a, 0);
      g += kD1[o + 2] * v;
      s += kD2[o + 2] * v;
    }
    r.grad[a] = g / h;
    r.hess[a][a] = s / (h * h);
    for (int b = a + 1; b < rd; ++b) {
      double m = 0.0;
      for (int oa = -2; oa <= 2; ++oa) {
        if (oa == 0) continue;
        for (int ob = -2; ob <= 2; ++ob) {
          if (ob == 0) continue;
          m += kD1[oa + 2] * kD1[ob + 2] * at(a, oa, b, ob);
        }
      }
      r.hess[a][b] = r.hess[b][a] = m / (h * h);
    }
  }
  return r;
}

MapDerivs evaluate(const MapField& map, std::size_t idx, DerivativePath path) {
  const auto& ch = map.chart;
  const bool analytic =
      path == DerivativePath::kAnalytic || (path == DerivativePath::kAuto && map.analytic);
  const auto w = ch.marked(idx);
  if (analytic) {
    if (!map.analytic) throw InvalidInputError("map has no analytic closure");
    return evaluate_analytic(map.analytic, map.dim(), ch.moduli(),
                             std::span<const double>(w.data(), ch.real_dim()), map.t0);
  }
  const MarkedJets m = marked_jets(ch.moduli(), std::span<const double>(w.data(), ch.real_dim()),
                                   map.t0);
  std::array<Jet, kMaxTargetDim> out;
  for (int k = 0; k < map.dim(); ++k) out[k] = compose_real_taylor(grid_taylor(map, idx, k), m, ch.n);
  MapDerivs d = derivs_from_jets(std::span<const Jet>(out.data(), map.dim()), ch.n);
  d.has_t = false;
  return d;
}

}  // namespace kahler::calc
