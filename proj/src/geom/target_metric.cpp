#include "kahler/geom/target_metric.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kahler/core/errors.hpp"

namespace kahler::geom {
namespace {

TMatrix zeros(int d) { return TMatrix::Zero(d, d); }

MetricGradient zero_gradient(int d) {
  MetricGradient g;
  for (auto& m : g) m = zeros(d);
  return g;
}

MetricHessian zero_hessian(int d) {
  MetricHessian hh;
  for (auto& row : hh) {
    for (auto& m : row) m = zeros(d);
  }
  return hh;
}

TMatrix standard_rotation() {
  TMatrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

TPoint point2(double a, double b) {
  TPoint p(2);
  p << a, b;
  return p;
}

// Exponential map of a model surface realized through an embedding P into a
// quadric of R^3 (the unit hyperboloid for sign = -1 with the Minkowski form,
// the unit sphere for sign = +1).
struct QuadricChart {
  double sign;
  std::function<Eigen::Vector3d(const TPoint&)> embed;
  std::function<Eigen::Matrix<double, 3, 2>(const TPoint&)> jacobian;
  std::function<TPoint(const Eigen::Vector3d&, const TPoint&)> project;  // (X, reference)

  double form(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    return sign < 0 ? -a(0) * b(0) + a(1) * b(1) + a(2) * b(2) : a.dot(b);
  }

  TPoint exp(const TPoint& p, const TPoint& v) const {
    const Eigen::Vector3d x = embed(p);
    const Eigen::Vector3d tangent = jacobian(p) * Eigen::Vector2d(v(0), v(1));
    const double len = std::sqrt(std::max(form(tangent, tangent), 0.0));
    if (len < 1e-300) return p;
    Eigen::Vector3d y;
    if (sign < 0) {
      y = std::cosh(len) * x + (std::sinh(len) / len) * tangent;
    } else {
      y = std::cos(len) * x + (std::sin(len) / len) * tangent;
    }
    return project(y, p);
  }
};

QuadricChart half_plane_chart() {
  QuadricChart q;
  q.sign = -1.0;
  q.embed = [](const TPoint& p) {
    const double x = p(0), y = p(1), r2 = x * x + y * y;
    return Eigen::Vector3d((r2 + 1.0) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y));
  };
  q.jacobian = [](const TPoint& p) {
    const double x = p(0), y = p(1), y2 = y * y;
    Eigen::Matrix<double, 3, 2> j;
    j << x / y, (y2 - x * x - 1.0) / (2.0 * y2),  //
        1.0 / y, -x / y2,                         //
        x / y, (y2 - x * x + 1.0) / (2.0 * y2);
    return j;
  };
  q.project = [](const Eigen::Vector3d& x, const TPoint&) {
    const double y = 1.0 / (x(0) - x(2));
    return point2(x(1) * y, y);
  };
  return q;
}

QuadricChart fermi_chart() {
  QuadricChart q;
  q.sign = -1.0;
  q.embed = [](const TPoint& p) {
    const double th = p(0), r = p(1);
    return Eigen::Vector3d(std::cosh(r) * std::cosh(th), std::cosh(r) * std::sinh(th),
                           std::sinh(r));
  };
  q.jacobian = [](const TPoint& p) {
    const double th = p(0), r = p(1);
    Eigen::Matrix<double, 3, 2> j;
    j << std::cosh(r) * std::sinh(th), std::sinh(r) * std::cosh(th),  //
        std::cosh(r) * std::cosh(th), std::sinh(r) * std::sinh(th),   //
        0.0, std::cosh(r);
    return j;
  };
  q.project = [](const Eigen::Vector3d& x, const TPoint&) {
    return point2(0.5 * std::log((x(0) + x(1)) / (x(0) - x(1))), std::asinh(x(2)));
  };
  return q;
}

QuadricChart sphere_chart() {
  QuadricChart q;
  q.sign = 1.0;
  q.embed = [](const TPoint& p) {
    const double th = p(0), ph = p(1);
    return Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                           std::cos(th));
  };
  q.jacobian = [](const TPoint& p) {
    const double th = p(0), ph = p(1);
    Eigen::Matrix<double, 3, 2> j;
    j << std::cos(th) * std::cos(ph), -std::sin(th) * std::sin(ph),  //
        std::cos(th) * std::sin(ph), std::sin(th) * std::cos(ph),    //
        -std::sin(th), 0.0;
    return j;
  };
  q.project = [](const Eigen::Vector3d& x, const TPoint& ref) {
    const double th = std::atan2(std::hypot(x(0), x(1)), x(2));
    double ph = std::atan2(x(1), x(0));
    // stay on the sheet of the reference longitude
    const double two_pi = 2.0 * std::numbers::pi;
    ph += two_pi * std::round((ref(1) - ph) / two_pi);
    return point2(th, ph);
  };
  return q;
}

}  // namespace

TargetPtr flat_plane() {
  auto m = std::make_shared<TargetMetric>();
  m->name = "flat-torus-R2";
  m->dim = 2;
  m->flat = true;
  m->h = [](const TPoint&) { return TMatrix(TMatrix::Identity(2, 2)); };
  m->dh = [](const TPoint&) { return zero_gradient(2); };
  m->d2h = [](const TPoint&) { return zero_hessian(2); };
  m->exp = [](const TPoint& p, const TPoint& v) { return TPoint(p + v); };
  m->complex_structure = [](const TPoint&) { return standard_rotation(); };
  m->in_domain = [](const TPoint&) { return true; };
  m->sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = u(rng);
    return point2(a, u(rng));
  };
  return m;
}

TargetPtr hyperbolic_upper_half_plane() {
  auto m = std::make_shared<TargetMetric>();
  m->name = "hyperbolic-upper-half-plane";
  m->dim = 2;
  m->h = [](const TPoint& p) {
    const double y = p(1);
    return TMatrix(TMatrix::Identity(2, 2) / (y * y));
  };
  m->dh = [](const TPoint& p) {
    const double y = p(1);
    auto g = zero_gradient(2);
    g[1] = TMatrix::Identity(2, 2) * (-2.0 / (y * y * y));
    return g;
  };
  m->d2h = [](const TPoint& p) {
    const double y = p(1);
    auto hh = zero_hessian(2);
    hh[1][1] = TMatrix::Identity(2, 2) * (6.0 / (y * y * y * y));
    return hh;
  };
  const auto chart = half_plane_chart();
  m->exp = [chart](const TPoint& p, const TPoint& v) { return chart.exp(p, v); };
  m->complex_structure = [](const TPoint&) { return standard_rotation(); };
  m->in_domain = [](const TPoint& p) { return p(1) > 0.0; };
  m->sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(0.25, 4.0);
    const double a = ux(rng);
    return point2(a, uy(rng));
  };
  return m;
}

TargetPtr hyperbolic_cylinder() {
  auto m = std::make_shared<TargetMetric>();
  m->name = "hyperbolic-cylinder";
  m->dim = 2;
  m->h = [](const TPoint& p) {
    TMatrix h = TMatrix::Identity(2, 2);
    const double c = std::cosh(p(1));
    h(0, 0) = c * c;
    return h;
  };
  m->dh = [](const TPoint& p) {
    auto g = zero_gradient(2);
    g[1](0, 0) = std::sinh(2.0 * p(1));
    return g;
  };
  m->d2h = [](const TPoint& p) {
    auto hh = zero_hessian(2);
    hh[1][1](0, 0) = 2.0 * std::cosh(2.0 * p(1));
    return hh;
  };
  const auto chart = fermi_chart();
  m->exp = [chart](const TPoint& p, const TPoint& v) { return chart.exp(p, v); };
  m->complex_structure = [](const TPoint& p) {
    const double c = std::cosh(p(1));
    TMatrix j(2, 2);
    j << 0.0, -1.0 / c, c, 0.0;
    return j;
  };
  m->in_domain = [](const TPoint&) { return true; };
  m->sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(-2.0, 2.0), ur(-1.5, 1.5);
    const double a = ut(rng);
    return point2(a, ur(rng));
  };
  return m;
}

TargetPtr unit_sphere() {
  auto m = std::make_shared<TargetMetric>();
  m->name = "sphere-1";
  m->dim = 2;
  m->h = [](const TPoint& p) {
    TMatrix h = TMatrix::Identity(2, 2);
    const double s = std::sin(p(0));
    h(1, 1) = s * s;
    return h;
  };
  m->dh = [](const TPoint& p) {
    auto g = zero_gradient(2);
    g[0](1, 1) = std::sin(2.0 * p(0));
    return g;
  };
  m->d2h = [](const TPoint& p) {
    auto hh = zero_hessian(2);
    hh[0][0](1, 1) = 2.0 * std::cos(2.0 * p(0));
    return hh;
  };
  const auto chart = sphere_chart();
  m->exp = [chart](const TPoint& p, const TPoint& v) { return chart.exp(p, v); };
  m->complex_structure = [](const TPoint& p) {
    const double s = std::sin(p(0));
    TMatrix j(2, 2);
    j << 0.0, -s, 1.0 / s, 0.0;
    return j;
  };
  m->in_domain = [](const TPoint& p) { return p(0) > 0.0 && p(0) < std::numbers::pi; };
  m->sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(0.3, std::numbers::pi - 0.3),
        up(-std::numbers::pi, std::numbers::pi);
    const double a = ut(rng);
    return point2(a, up(rng));
  };
  return m;
}

TargetPtr product(TargetPtr a, TargetPtr b) {
  if (a->dim + b->dim > kMaxTargetDim) {
    throw InvalidInputError("product target exceeds dimension " +
                            std::to_string(kMaxTargetDim));
  }
  auto m = std::make_shared<TargetMetric>();
  m->name = "product:" + a->name + "," + b->name;
  const int da = a->dim, db = b->dim, d = da + db;
  m->dim = d;
  m->flat = a->flat && b->flat;
  auto split = [da, db](const TPoint& p) {
    return std::pair<TPoint, TPoint>(p.head(da), p.segment(da, db));
  };
  m->h = [a, b, split, d, da, db](const TPoint& p) {
    auto [pa, pb] = split(p);
    TMatrix h = TMatrix::Zero(d, d);
    h.topLeftCorner(da, da) = a->h(pa);
    h.bottomRightCorner(db, db) = b->h(pb);
    return h;
  };
  m->dh = [a, b, split, d, da, db](const TPoint& p) {
    auto [pa, pb] = split(p);
    auto g = zero_gradient(d);
    const auto ga = a->dh(pa);
    const auto gb = b->dh(pb);
    for (int k = 0; k < da; ++k) g[k].topLeftCorner(da, da) = ga[k];
    for (int k = 0; k < db; ++k) g[da + k].bottomRightCorner(db, db) = gb[k];
    return g;
  };
  m->d2h = [a, b, split, d, da, db](const TPoint& p) {
    auto [pa, pb] = split(p);
    auto hh = zero_hessian(d);
    const auto ha = a->d2h(pa);
    const auto hb = b->d2h(pb);
    for (int k = 0; k < da; ++k) {
      for (int l = 0; l < da; ++l) hh[k][l].topLeftCorner(da, da) = ha[k][l];
    }
    for (int k = 0; k < db; ++k) {
      for (int l = 0; l < db; ++l) hh[da + k][da + l].bottomRightCorner(db, db) = hb[k][l];
    }
    return hh;
  };
  m->exp = [a, b, split, d, da, db](const TPoint& p, const TPoint& v) {
    auto [pa, pb] = split(p);
    auto [va, vb] = split(v);
    TPoint r(d);
    r.head(da) = a->exp(pa, va);
    r.segment(da, db) = b->exp(pb, vb);
    return r;
  };
  if (a->is_kahler() && b->is_kahler()) {
    m->complex_structure = [a, b, split, d, da, db](const TPoint& p) {
      auto [pa, pb] = split(p);
      TMatrix j = TMatrix::Zero(d, d);
      j.topLeftCorner(da, da) = a->complex_structure(pa);
      j.bottomRightCorner(db, db) = b->complex_structure(pb);
      return j;
    };
  }
  m->in_domain = [a, b, split](const TPoint& p) {
    auto [pa, pb] = split(p);
    return a->in_domain(pa) && b->in_domain(pb);
  };
  m->sample_point = [a, b, d, da, db](std::mt19937_64& rng) {
    TPoint r(d);
    r.head(da) = a->sample_point(rng);
    r.segment(da, db) = b->sample_point(rng);
    return r;
  };
  return m;
}

TargetPtr make_target(std::string_view name) {
  if (name == "flat-torus-R2") return flat_plane();
  if (name == "hyperbolic-upper-half-plane") return hyperbolic_upper_half_plane();
  if (name == "hyperbolic-cylinder") return hyperbolic_cylinder();
  if (name == "sphere-1") return unit_sphere();
  constexpr std::string_view prefix = "product:";
  if (name.starts_with(prefix)) {
    // factors are 2-dimensional, so products do not nest within kMaxTargetDim
    const auto rest = name.substr(prefix.size());
    const auto comma = rest.find(',');
    if (comma != std::string_view::npos) {
      return product(make_target(rest.substr(0, comma)), make_target(rest.substr(comma + 1)));
    }
  }
  throw InvalidInputError("unknown target '" + std::string(name) + "'");
}

std::vector<std::string> registered_targets() {
  return {"flat-torus-R2", "hyperbolic-upper-half-plane", "hyperbolic-cylinder", "sphere-1",
          "product:<a>,<b>"};
}

double check_positive(const TargetMetric& metric, const TPoint& p) {
  if (!metric.in_domain(p)) {
    throw DomainError("point outside the chart of " + metric.name);
  }
  const TMatrix h = metric.h(p);
  Eigen::SelfAdjointEigenSolver<TMatrix> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 0.0)) {
    throw DegenerateMetricError(metric.name + ": metric not positive definite (min eigenvalue " +
                                std::to_string(lo) + ")");
  }
  return lo;
}

}  // namespace kahler::geom
