#include "kahler/calc/map_calculus.hpp"

#include <cmath>
#include <iomanip>
#include <random>

#include "kahler/core/errors.hpp"
#include "kahler/core/numerics.hpp"

namespace kahler::calc {
namespace {

using EpsHessian = std::array<std::array<HMatrix, kMaxHolo>, kMaxHolo>;

struct PointGeometry {
  TMatrix h;
  geom::CurvatureAtPoint curv;
};

PointGeometry geometry_at(const geom::TargetMetric& t, const TPoint& p) {
  return {t.h(p), geom::riemann(t, p)};
}

// d_c d_dbar eps from real second derivatives D[a][b] in marked coordinates.
EpsHessian complexify(const FiberChart& ch, const std::array<std::array<HMatrix, 4>, 4>& D) {
  const int n = ch.n, rd = ch.real_dim();
  EpsHessian out;
  for (int c = 0; c < n; ++c) {
    for (int d = 0; d < n; ++d) {
      HMatrix acc = HMatrix::Zero(n, n);
      for (int a = 0; a < rd; ++a) {
        const cplx ca = ch.dz_coeff(c, a);
        if (ca == cplx{}) continue;
        for (int b = 0; b < rd; ++b) {
          const cplx cb = std::conj(ch.dz_coeff(d, b));
          if (cb == cplx{}) continue;
          acc += ca * cb * D[a][b];
        }
      }
      out[c][d] = acc;
    }
  }
  return out;
}

// Real Hessian of eps at grid coordinates c, with eps supplied by a callback
// taking grid coordinates.
template <class EpsAt>
std::array<std::array<HMatrix, 4>, 4> eps_hessian(const FiberChart& ch,
                                                  std::array<int, 2 * kMaxFiberDim> c,
                                                  EpsAt&& eps_at) {
  const int rd = ch.real_dim();
  const double h = ch.spacing();
  std::array<std::array<HMatrix, 4>, 4> D;
  const HMatrix e0 = eps_at(c);
  for (int a = 0; a < rd; ++a) {
    HMatrix s = kD2[2] * e0;
    for (int o : {-2, -1, 1, 2}) {
      auto cc = c;
      cc[a] += o;
      s += kD2[o + 2] * eps_at(cc);
    }
    D[a][a] = s / (h * h);
    for (int b = a + 1; b < rd; ++b) {
      HMatrix m = HMatrix::Zero(e0.rows(), e0.cols());
      for (int oa : {-2, -1, 1, 2}) {
        for (int ob : {-2, -1, 1, 2}) {
          auto cc = c;
          cc[a] += oa;
          cc[b] += ob;
          m += (kD1[oa + 2] * kD1[ob + 2]) * eps_at(cc);
        }
      }
      D[a][b] = D[b][a] = m / (h * h);
    }
  }
  return D;
}

}  // namespace

Differentials differentials(const MapField& map, DerivativePath path) {
  Differentials d;
  d.at.reserve(map.chart.size());
  for (std::size_t i = 0; i < map.chart.size(); ++i) d.at.push_back(evaluate(map, i, path));
  return d;
}

std::vector<HMatrix> epsilon_form(const MapField& map, DerivativePath path) {
  std::vector<HMatrix> out;
  out.reserve(map.chart.size());
  for (std::size_t i = 0; i < map.chart.size(); ++i) {
    const MapDerivs f = evaluate(map, i, path);
    out.push_back(epsilon_at(f, map.target->h(f.value), map.chart.n));
  }
  return out;
}

EnergyBreakdown energy(const MapField& map, KMode mode, DerivativePath path) {
  const auto& t = *map.target;
  const bool kahler = t.is_kahler();
  if (mode == KMode::kRequired && !kahler) {
    throw UnsupportedInvariantError("K needs a complex structure on target " + t.name);
  }
  const bool want_split = kahler && mode != KMode::kNone;
  const auto& ch = map.chart;
  const int n = ch.n;
  const HMatrix g = ch.metric();
  const HMatrix ginv = inverse_metric(g);
  const double w = ch.cell_weight();

  EnergyBreakdown r;
  r.e_field.resize(ch.size());
  r.min_split_density = want_split ? std::numeric_limits<double>::infinity() : 0.0;
  CompensatedSum se, s1, s2, sk;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const MapDerivs f = evaluate(map, i, path);
    const TMatrix h = t.h(f.value);
    const double e = energy_density(epsilon_at(f, h, n), ginv);
    r.e_field[i] = e;
    se.add(e * w);
    if (want_split) {
      const TMatrix J = t.complex_structure(f.value);
      const SplitDensity sd = split_density(f, h, J, ginv, n);
      s1.add(sd.e1 * w);
      s2.add(sd.e2 * w);
      r.max_split_defect = std::max(r.max_split_defect, std::abs(e - sd.e1 - sd.e2));
      r.min_split_density = std::min({r.min_split_density, sd.e1, sd.e2});
      sk.add(kahler_pullback_density(f, h, J, g, n) * w);
    }
  }
  r.E = se.value();
  if (want_split) {
    r.E_prime = s1.value();
    r.E_doubleprime = s2.value();
    r.K = r.E_prime - r.E_doubleprime;
    r.K_form = sk.value();
  }
  return r;
}

SecondFundamentalField second_fundamental(const MapField& map, DerivativePath path) {
  const auto& t = *map.target;
  const auto& ch = map.chart;
  const HMatrix g = ch.metric();
  const HMatrix ginv = inverse_metric(g);
  SecondFundamentalField r;
  r.hs_norm.resize(ch.size());
  r.tension_norm.resize(ch.size());
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const MapDerivs f = evaluate(map, i, path);
    const TMatrix h = t.h(f.value);
    const auto T = second_fundamental_at(f, geom::christoffel(t, f.value), ch.n);
    const HMatrix E = unitary_frame(g);
    double hs = 0.0;
    for (int b = 0; b < ch.n; ++b) {
      for (int a = 0; a < ch.n; ++a) {
        TCVec tf = TCVec::Zero(f.dim);
        for (int nu = 0; nu < ch.n; ++nu) {
          for (int mu = 0; mu < ch.n; ++mu) tf += std::conj(E(nu, b)) * E(mu, a) * T.T[nu][mu];
        }
        hs += hnorm2(h, tf);
      }
    }
    const TCVec tr = trace(T, ginv);
    r.hs_norm[i] = std::sqrt(std::max(hs, 0.0));
    r.tension_norm[i] = std::sqrt(std::max(hnorm2(h, tr), 0.0));
    r.max_hs = std::max(r.max_hs, r.hs_norm[i]);
    r.max_tension = std::max(r.max_tension, r.tension_norm[i]);
    r.max_tension_coord = std::max(r.max_tension_coord, 2.0 * tr.cwiseAbs().maxCoeff());
  }
  return r;
}

TPoint tension_vector(const MapField& map, std::size_t idx, DerivativePath path) {
  const MapDerivs f = evaluate(map, idx, path);
  const auto T = second_fundamental_at(f, geom::christoffel(*map.target, f.value), map.chart.n);
  return 2.0 * trace(T, inverse_metric(map.chart.metric())).real();
}

BochnerReport bochner_residual(const MapField& map, std::span<const std::size_t> samples) {
  const auto& t = *map.target;
  const auto& ch = map.chart;
  const int n = ch.n;
  const HMatrix g = ch.metric();

  BochnerReport rep;
  rep.N = ch.N;

  auto rhs_at = [&](const MapDerivs& f) {
    const PointGeometry pg = geometry_at(t, f.value);
    const auto T = second_fundamental_at(f, pg.curv.gamma, n);
    return bochner_terms(f, T, g, pg.h, pg.curv.riem_lowered, n);
  };
  auto record = [&](double lhs, const BochnerTerms& bt) {
    const double rhs = bt.rhs();
    rep.max_residual = std::max(rep.max_residual, std::abs(lhs - rhs));
    rep.max_lhs = std::max(rep.max_lhs, std::abs(lhs));
    rep.max_rhs = std::max(rep.max_rhs, std::abs(rhs));
    rep.max_curvature_term = std::max(rep.max_curvature_term, std::abs(bt.curvature));
    rep.max_hs_term = std::max(rep.max_hs_term, bt.hs);
  };

  const bool sample_mode = !samples.empty() && map.analytic;
  if (sample_mode) {
    auto eps_at = [&](std::array<int, 2 * kMaxFiberDim> c) {
      std::array<double, 2 * kMaxFiberDim> w{};
      for (int a = 0; a < ch.real_dim(); ++a) w[a] = c[a] * ch.spacing();
      const MapDerivs f = evaluate_analytic(map.analytic, map.dim(), ch.moduli(),
                                            std::span<const double>(w.data(), ch.real_dim()),
                                            map.t0);
      return epsilon_at(f, t.h(f.value), n);
    };
    for (std::size_t idx : samples) {
      const auto c = ch.unravel(idx);
      const double lhs = bochner_lhs_density(complexify(ch, eps_hessian(ch, c, eps_at)), g);
      record(lhs, rhs_at(evaluate(map, idx)));
      ++rep.points;
    }
    return rep;
  }

  rep.whole_grid = true;
  std::vector<HMatrix> eps = epsilon_form(map);
  auto eps_at = [&](std::array<int, 2 * kMaxFiberDim> c) -> const HMatrix& {
    return eps[ch.ravel(c)];
  };
  CompensatedSum il, ir;
  const double w = ch.cell_weight();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const double lhs = bochner_lhs_density(complexify(ch, eps_hessian(ch, ch.unravel(i), eps_at)), g);
    const BochnerTerms bt = rhs_at(evaluate(map, i));
    record(lhs, bt);
    il.add(lhs * w);
    ir.add(bt.rhs() * w);
    ++rep.points;
  }
  rep.lhs_integral = il.value();
  rep.rhs_integral = ir.value();
  return rep;
}

BochnerConvergence bochner_convergence(geom::TargetPtr target, const FiberChart& base,
                                       const MarkedMap& map,
                                       const std::array<TPoint, 2 * kMaxFiberDim>& shifts,
                                       std::span<const int> grids, std::size_t samples,
                                       std::uint64_t seed) {
  if (grids.empty()) throw InvalidInputError("no grids given");
  BochnerConvergence out;
  const int n0 = grids[0];
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n0 - 1);
  std::vector<std::array<int, 2 * kMaxFiberDim>> coarse(samples);
  for (auto& c : coarse) {
    for (int a = 0; a < base.real_dim(); ++a) c[a] = pick(rng);
  }
  for (int N : grids) {
    if (N % n0 != 0) throw InvalidInputError("grids must refine the first grid");
    FiberChart ch = base;
    ch.N = N;
    MapField m;
    m.target = target;
    m.chart = ch;
    m.shifts = shifts;
    m.analytic = map;
    m.lift.assign(ch.size() * target->dim, 0.0);  // unused in sample mode
    std::vector<std::size_t> idx;
    for (auto c : coarse) {
      for (int a = 0; a < ch.real_dim(); ++a) c[a] *= N / n0;
      idx.push_back(ch.ravel(c));
    }
    out.grids.push_back(N);
    out.residuals.push_back(bochner_residual(m, idx).max_residual);
  }
  out.orders = observed_orders(out.residuals);
  for (std::size_t k = 0; k < out.orders.size(); ++k) {
    if (!std::isfinite(out.orders[k]) || out.orders[k] < 0.5) out.warning = true;
    if (k > 0 && std::abs(out.orders[k] - out.orders[k - 1]) > 1.5) out.warning = true;
  }
  if (!out.residuals.empty() && out.residuals.back() < 1e-12) out.warning = true;
  return out;
}

void write_field_csv(std::ostream& os, const MapField& map) {
  const auto& ch = map.chart;
  const auto sf = second_fundamental(map);
  const auto en = energy(map, KMode::kNone);
  os << std::setprecision(17);
  for (int a = 0; a < ch.real_dim(); ++a) os << 'w' << a << ',';
  for (int k = 0; k < map.dim(); ++k) os << "phi" << k << ',';
  os << "e,dd_norm,tension_norm\n";
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto w = ch.marked(i);
    for (int a = 0; a < ch.real_dim(); ++a) os << w[a] << ',';
    for (int k = 0; k < map.dim(); ++k) os << map.lift[i * map.dim() + k] << ',';
    os << en.e_field[i] << ',' << sf.hs_norm[i] << ',' << sf.tension_norm[i] << '\n';
  }
}

}  // namespace kahler::calc
