#include "kahler/geom/curvature.hpp"

#include <cmath>
#include <limits>

#include "kahler/core/errors.hpp"

namespace kahler::geom {
namespace {

TMatrix checked_inverse(const TargetMetric& metric, const TPoint& p, const TMatrix& h) {
  check_positive(metric, p);
  return h.inverse();
}

// dGamma[m] = d_m Gamma (same layout as Christoffel::upper)
using ChristoffelGradient = std::array<Christoffel, kMaxTargetDim>;

Tensor4 assemble_mixed(const Christoffel& g, const ChristoffelGradient& dg) {
  const int d = g.dim;
  Tensor4 r;
  r.dim = d;
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          double v = dg[i](l, j, k) - dg[j](l, i, k);
          for (int m = 0; m < d; ++m) v += g(l, i, m) * g(m, j, k) - g(l, j, m) * g(m, i, k);
          r(l, k, i, j) = v;
        }
      }
    }
  }
  return r;
}

Tensor4 lower(const TMatrix& h, const Tensor4& mixed) {
  const int d = mixed.dim;
  Tensor4 r;
  r.dim = d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          double v = 0.0;
          for (int m = 0; m < d; ++m) v += h(k, m) * mixed(m, l, i, j);
          r(i, j, k, l) = v;
        }
      }
    }
  }
  return r;
}

}  // namespace

TCVec Christoffel::contract(const TCVec& x, const TCVec& y) const {
  TCVec r = TCVec::Zero(dim);
  for (int k = 0; k < dim; ++k) {
    r(k) = x.transpose() * upper[k].cast<cplx>() * y;
  }
  return r;
}

Christoffel christoffel(const TargetMetric& metric, const TPoint& p) {
  const int d = metric.dim;
  const TMatrix h = metric.h(p);
  const TMatrix hinv = checked_inverse(metric, p, h);
  const MetricGradient dh = metric.dh(p);
  Christoffel g;
  g.dim = d;
  for (int k = 0; k < d; ++k) g.upper[k] = TMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        const double s = dh[i](j, l) + dh[j](i, l) - dh[l](i, j);
        for (int k = 0; k < d; ++k) g.upper[k](i, j) += 0.5 * hinv(k, l) * s;
      }
    }
  }
  return g;
}

CurvatureAtPoint riemann(const TargetMetric& metric, const TPoint& p) {
  const int d = metric.dim;
  const TMatrix h = metric.h(p);
  const TMatrix hinv = checked_inverse(metric, p, h);
  const MetricGradient dh = metric.dh(p);
  const MetricHessian d2h = metric.d2h(p);

  CurvatureAtPoint out;
  out.gamma = christoffel(metric, p);

  ChristoffelGradient dg;
  for (int m = 0; m < d; ++m) {
    dg[m].dim = d;
    const TMatrix dhinv = -hinv * dh[m] * hinv;
    for (int k = 0; k < d; ++k) dg[m].upper[k] = TMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
          const double s = dh[i](j, l) + dh[j](i, l) - dh[l](i, j);
          const double ds = d2h[m][i](j, l) + d2h[m][j](i, l) - d2h[m][l](i, j);
          for (int k = 0; k < d; ++k) {
            dg[m].upper[k](i, j) += 0.5 * (dhinv(k, l) * s + hinv(k, l) * ds);
          }
        }
      }
    }
  }
  out.riem_mixed = assemble_mixed(out.gamma, dg);
  out.riem_lowered = lower(h, out.riem_mixed);
  return out;
}

Tensor4 riemann_fd(const TargetMetric& metric, const TPoint& p, double step) {
  const int d = metric.dim;
  const Christoffel g = christoffel(metric, p);
  ChristoffelGradient dg;
  for (int m = 0; m < d; ++m) {
    TPoint plus = p, minus = p;
    plus(m) += step;
    minus(m) -= step;
    const Christoffel gp = christoffel(metric, plus);
    const Christoffel gm = christoffel(metric, minus);
    dg[m].dim = d;
    for (int k = 0; k < d; ++k) dg[m].upper[k] = (gp.upper[k] - gm.upper[k]) / (2.0 * step);
  }
  return lower(metric.h(p), assemble_mixed(g, dg));
}

cplx curvature_form(const Tensor4& r, const TCVec& x, const TCVec& y, const TCVec& z,
                    const TCVec& w) {
  const int d = r.dim;
  cplx acc{};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const cplx xy = x(i) * y(j);
      if (xy == cplx{}) continue;
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) acc += r(i, j, k, l) * xy * z(k) * w(l);
      }
    }
  }
  return acc;
}

double complexified_quadform(const Tensor4& lowered, const TCVec& x, const TCVec& y) {
  const TCVec xb = x.conjugate(), yb = y.conjugate();
  const cplx v = curvature_form(lowered, x, y, xb, yb);
  const int d = lowered.dim;
  double scale = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          scale += std::abs(lowered(i, j, k, l)) * std::abs(x(i)) * std::abs(y(j)) *
                   std::abs(x(k)) * std::abs(y(l));
        }
      }
    }
  }
  if (std::abs(v.imag()) > 1e-12 * std::max(1.0, scale)) {
    throw Error("complexified quadform has imaginary part " + std::to_string(v.imag()));
  }
  return v.real();
}

double complexified_quadform(const TargetMetric& metric, const TPoint& p, const TCVec& x,
                             const TCVec& y) {
  return complexified_quadform(riemann(metric, p).riem_lowered, x, y);
}

double sectional_numerator(const Tensor4& r, const TPoint& x, const TPoint& y) {
  const int d = r.dim;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) acc += r(i, j, k, l) * x(i) * y(j) * x(k) * y(l);
      }
    }
  }
  return acc;
}

double wedge_norm_sq(const TMatrix& h, const TCVec& x, const TCVec& y) {
  const double xx = bilinear(h, x, x.conjugate()).real();
  const double yy = bilinear(h, y, y.conjugate()).real();
  const cplx xy = bilinear(h, x, y.conjugate());
  return std::max(0.0, xx * yy - std::norm(xy));
}

std::vector<CurvatureSample> random_samples(const TargetMetric& metric, std::size_t count,
                                            std::uint64_t seed, double min_wedge) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<CurvatureSample> out;
  out.reserve(count);
  while (out.size() < count) {
    CurvatureSample s;
    s.p = metric.sample_point(rng);
    s.x = TCVec(metric.dim);
    s.y = TCVec(metric.dim);
    for (int i = 0; i < metric.dim; ++i) {
      const double a = normal(rng);
      s.x(i) = cplx(a, normal(rng));
    }
    for (int i = 0; i < metric.dim; ++i) {
      const double a = normal(rng);
      s.y(i) = cplx(a, normal(rng));
    }
    if (std::sqrt(wedge_norm_sq(metric.h(s.p), s.x, s.y)) < min_wedge) continue;
    out.push_back(std::move(s));
  }
  return out;
}

ConditionReport check_curvature_condition(const TargetMetric& metric,
                                          std::span<const CurvatureSample> samples, bool strict,
                                          double margin) {
  if (samples.empty()) throw InvalidInputError("curvature condition check needs samples");
  ConditionReport rep;
  rep.target = metric.name;
  rep.strict = strict;
  rep.margin = margin;
  rep.samples = samples.size();
  rep.max_value = -std::numeric_limits<double>::infinity();
  rep.min_wedge = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const CurvatureAtPoint c = riemann(metric, s.p);
    const double q = complexified_quadform(c.riem_lowered, s.x, s.y);
    rep.min_wedge = std::min(rep.min_wedge, std::sqrt(wedge_norm_sq(metric.h(s.p), s.x, s.y)));
    if (q > rep.max_value) {
      rep.max_value = q;
      rep.witness = s;
    }
  }
  rep.pass = strict ? rep.max_value < -margin : rep.max_value <= 0.0;
  return rep;
}

}  // namespace kahler::geom
