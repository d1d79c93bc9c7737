#include "kahler/flow/harmonic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kahler/calc/map_calculus.hpp"
#include "kahler/core/errors.hpp"
#include "kahler/core/numerics.hpp"
#include "kahler/geom/curvature.hpp"

namespace kahler::flow {

using calc::FiberChart;
using calc::MapField;

double default_dt(const FiberChart& chart) {
  const double h = chart.spacing();
  return 0.3 * h * h / chart.inverse_metric_w().cwiseAbs().sum();
}

GridTension grid_tension(const MapField& map) {
  const auto& ch = map.chart;
  const int rd = ch.real_dim();
  const int dim = map.dim();
  const int N = ch.N;
  const double h = ch.spacing();
  const double ih2 = 1.0 / (h * h);
  const Eigen::MatrixXd Q = ch.inverse_metric_w();
  const std::size_t npts = ch.size();
  const bool flat = map.target->flat;

  // stride of axis a in the row-major ravel
  std::array<std::size_t, 2 * kMaxFiberDim> stride{};
  {
    std::size_t st = 1;
    for (int a = rd - 1; a >= 0; --a) {
      stride[a] = st;
      st *= static_cast<std::size_t>(N);
    }
  }
  // value of component k at offset o along axis a, with monodromy
  auto along = [&](std::size_t idx, int ca, int a, int o, int k) {
    int c = ca + o;
    double shift = 0.0;
    if (c < 0) {
      c += N;
      shift = -map.shifts[a](k);
    } else if (c >= N) {
      c -= N;
      shift = map.shifts[a](k);
    }
    const std::size_t j = idx + (static_cast<std::ptrdiff_t>(c) - ca) * static_cast<std::ptrdiff_t>(stride[a]);
    return map.lift[j * dim + k] + shift;
  };

  GridTension out;
  out.tension.assign(map.lift.size(), 0.0);
  CompensatedSum energy;
  TMatrix hflat;
  if (flat) hflat = map.target->h(map.at(0));

  for (std::size_t idx = 0; idx < npts; ++idx) {
    const auto c = ch.unravel(idx);
    std::array<std::array<double, kMaxTargetDim>, 2 * kMaxFiberDim> grad{};
    std::array<double, kMaxTargetDim> lap{};
    for (int k = 0; k < dim; ++k) {
      const double v0 = map.lift[idx * dim + k];
      for (int a = 0; a < rd; ++a) {
        const double m2 = along(idx, c[a], a, -2, k), m1 = along(idx, c[a], a, -1, k);
        const double p1 = along(idx, c[a], a, 1, k), p2 = along(idx, c[a], a, 2, k);
        grad[a][k] = (calc::kD1[0] * m2 + calc::kD1[1] * m1 + calc::kD1[3] * p1 +
                      calc::kD1[4] * p2) / h;
        lap[k] += Q(a, a) * ih2 *
                  (calc::kD2[0] * m2 + calc::kD2[1] * m1 + calc::kD2[2] * v0 +
                   calc::kD2[3] * p1 + calc::kD2[4] * p2);
        for (int b = a + 1; b < rd; ++b) {
          if (Q(a, b) == 0.0) continue;
          double m = 0.0;
          for (int oa = -2; oa <= 2; ++oa) {
            if (oa == 0) continue;
            for (int ob = -2; ob <= 2; ++ob) {
              if (ob == 0) continue;
              auto cc = c;
              cc[a] += oa;
              cc[b] += ob;
              m += calc::kD1[oa + 2] * calc::kD1[ob + 2] * map.wrapped(cc, k);
            }
          }
          lap[k] += 2.0 * Q(a, b) * m * ih2;
        }
      }
    }
    TPoint tau(dim);
    for (int k = 0; k < dim; ++k) tau(k) = lap[k];
    const TPoint p = map.at(idx);
    const TMatrix hp = flat ? hflat : map.target->h(p);
    geom::Christoffel gamma;
    if (!flat) gamma = geom::christoffel(*map.target, p);
    double e = 0.0;
    for (int a = 0; a < rd; ++a) {
      for (int b = 0; b < rd; ++b) {
        if (Q(a, b) == 0.0) continue;
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j < dim; ++j) {
            const double gg = grad[a][i] * grad[b][j] * Q(a, b);
            e += 0.5 * hp(i, j) * gg;
            if (!flat) {
              for (int k = 0; k < dim; ++k) tau(k) += gamma.upper[k](i, j) * gg;
            }
          }
        }
      }
    }
    for (int k = 0; k < dim; ++k) out.tension[idx * dim + k] = tau(k);
    out.sup = std::max(out.sup, std::sqrt(std::max(0.0, tau.dot(hp * tau))));
    energy.add(e * ch.cell_weight());
  }
  out.energy = energy.value();
  return out;
}

namespace {

void apply_step(MapField& map, const std::vector<double>& tension, double dt) {
  const int dim = map.dim();
  std::vector<double> next(map.lift.size());
  for (std::size_t idx = 0; idx < map.chart.size(); ++idx) {
    TPoint v(dim);
    for (int k = 0; k < dim; ++k) v(k) = dt * tension[idx * dim + k];
    const TPoint q = map.target->exp(map.at(idx), v);
    for (int k = 0; k < dim; ++k) next[idx * dim + k] = q(k);
  }
  map.lift = std::move(next);
}

}  // namespace

FlowResult flow(const MapField& map0, const FlowParams& params) {
  if (params.tol <= 0.0) throw InvalidInputError("flow tolerance must be positive");
  FlowResult r;
  r.dt = params.dt > 0.0 ? params.dt : default_dt(map0.chart);
  r.map = map0;
  r.map.analytic = nullptr;

  GridTension g = grid_tension(r.map);
  r.energy.push_back(g.energy);
  r.tension.push_back(g.sup);
  while (g.sup > params.tol) {
    if (r.steps >= params.max_steps) {
      std::ostringstream os;
      os << "harmonic flow did not converge in " << params.max_steps
         << " steps, sup tension " << g.sup;
      throw NonConvergenceError(os.str(), g.sup);
    }
    apply_step(r.map, g.tension, r.dt);
    ++r.steps;
    const double prev = g.energy;
    g = grid_tension(r.map);
    const double rise = g.energy - prev;
    r.max_energy_increase = std::max(r.max_energy_increase, rise);
    if (!std::isfinite(g.energy) || rise > params.safeguard) {
      std::ostringstream os;
      os << "energy increased by " << rise << " at step " << r.steps << " (dt " << r.dt
         << "); try a smaller dt";
      throw InstabilityError(os.str());
    }
    r.energy.push_back(g.energy);
    r.tension.push_back(g.sup);
  }
  r.final_tension = g.sup;
  return r;
}

double step_displacement(const MapField& map, double dt) {
  MapField m = map;
  apply_step(m, grid_tension(map).tension, dt);
  double d = 0.0;
  for (std::size_t i = 0; i < m.lift.size(); ++i) d = std::max(d, std::abs(m.lift[i] - map.lift[i]));
  return d;
}

PluriharmonicReport verify_pluriharmonic(const MapField& map, double flow_tol) {
  PluriharmonicReport r;
  const auto sf = calc::second_fundamental(map);
  r.dd_sup = sf.max_hs;
  r.tension_sup = sf.max_tension;
  r.flow_tol = flow_tol;
  r.h = map.chart.spacing();
  r.threshold = kPluriharmonicConstant * (flow_tol + r.h * r.h);
  const auto samples = geom::random_samples(*map.target, 500, 0x5155u, 0.1);
  const auto cond = geom::check_curvature_condition(*map.target, samples, false);
  r.condition_holds = cond.pass;
  r.condition_max = cond.max_value;
  r.informational = !cond.pass;
  r.pass = cond.pass && r.dd_sup <= r.threshold;
  return r;
}

void write_energy_trace(std::ostream& os, const FlowResult& r) {
  os << "step,energy,tension\n";
  os.precision(17);
  for (std::size_t i = 0; i < r.energy.size(); ++i)
    os << i << ',' << r.energy[i] << ',' << r.tension[i] << '\n';
}

}  // namespace kahler::flow
