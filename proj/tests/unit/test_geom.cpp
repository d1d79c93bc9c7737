#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kahler/core/errors.hpp"
#include "kahler/core/numerics.hpp"
#include "kahler/geom/curvature.hpp"
#include "kahler/geom/target_metric.hpp"

namespace kahler::geom {
namespace {

TPoint pt(double a, double b) {
  TPoint p(2);
  p << a, b;
  return p;
}

TCVec cvec(std::initializer_list<cplx> xs) {
  TCVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (cplx x : xs) v(i++) = x;
  return v;
}

std::vector<TargetPtr> analytic_targets() {
  return {flat_plane(), hyperbolic_upper_half_plane(), hyperbolic_cylinder(), unit_sphere(),
          make_target("product:hyperbolic-upper-half-plane,sphere-1")};
}

TEST(Christoffel, FlatIsZero) {
  const auto g = christoffel(*flat_plane(), pt(0.3, -0.7));
  for (int k = 0; k < 2; ++k) EXPECT_EQ(g.upper[k].norm(), 0.0);
}

TEST(Christoffel, HyperbolicAtBasePoint) {
  const auto g = christoffel(*hyperbolic_upper_half_plane(), pt(0.0, 1.0));
  // index 0 = x, 1 = y
  EXPECT_NEAR(g(0, 0, 1), -1.0, 1e-14);
  EXPECT_NEAR(g(0, 1, 0), -1.0, 1e-14);
  EXPECT_NEAR(g(1, 0, 0), 1.0, 1e-14);
  EXPECT_NEAR(g(1, 1, 1), -1.0, 1e-14);
  EXPECT_NEAR(g(0, 0, 0), 0.0, 1e-14);
  EXPECT_NEAR(g(1, 0, 1), 0.0, 1e-14);
}

TEST(Christoffel, SphereEquator) {
  const auto g = christoffel(*unit_sphere(), pt(std::numbers::pi / 2, 0.4));
  EXPECT_NEAR(g(0, 1, 1), 0.0, 1e-15);  // -sin cos
  EXPECT_NEAR(g(1, 0, 1), 0.0, 1e-15);  // cot
  const double th = 0.7;
  const auto g2 = christoffel(*unit_sphere(), pt(th, 0.0));
  EXPECT_NEAR(g2(0, 1, 1), -std::sin(th) * std::cos(th), 1e-14);
  EXPECT_NEAR(g2(1, 0, 1), std::cos(th) / std::sin(th), 1e-14);
}

TEST(Christoffel, SymmetricInLowerIndices) {
  std::mt19937_64 rng(7);
  for (const auto& t : analytic_targets()) {
    for (int s = 0; s < 20; ++s) {
      const auto g = christoffel(*t, t->sample_point(rng));
      for (int k = 0; k < t->dim; ++k) {
        EXPECT_LT((g.upper[k] - g.upper[k].transpose()).norm(), 1e-14) << t->name;
      }
    }
  }
}

TEST(Christoffel, DegenerateMetricThrows) {
  EXPECT_THROW(christoffel(*hyperbolic_upper_half_plane(), pt(0.0, -1.0)), DomainError);
  TargetMetric bad = *flat_plane();
  bad.h = [](const TPoint&) {
    TMatrix h = TMatrix::Identity(2, 2);
    h(1, 1) = 0.0;
    return h;
  };
  EXPECT_THROW(christoffel(bad, pt(0.0, 0.0)), DegenerateMetricError);
}

TEST(Metric, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (const auto& t : analytic_targets()) {
    const TPoint p = t->sample_point(rng);
    std::vector<double> errs;
    for (double step : {1e-2, 5e-3, 2.5e-3}) {
      const auto dh = t->dh(p);
      double e = 0.0;
      for (int k = 0; k < t->dim; ++k) {
        TPoint a = p, b = p;
        a(k) += step;
        b(k) -= step;
        e = std::max(e, ((t->h(a) - t->h(b)) / (2 * step) - dh[k]).cwiseAbs().maxCoeff());
      }
      errs.push_back(e);
    }
    if (t->flat || errs.back() < 1e-11) continue;
    for (double o : observed_orders(errs)) EXPECT_GT(o, 1.9) << t->name;
  }
}

TEST(Riemann, FlatIsZero) {
  const auto c = riemann(*flat_plane(), pt(1.0, 2.0));
  for (double v : c.riem_lowered.v) EXPECT_EQ(v, 0.0);
}

TEST(Riemann, HyperbolicCalibratesSign) {
  const auto c = riemann(*hyperbolic_upper_half_plane(), pt(0.0, 1.0));
  EXPECT_NEAR(c.riem_lowered(0, 1, 0, 1), -1.0, 1e-13);
  const TPoint p = pt(0.4, 2.5);
  const auto c2 = riemann(*hyperbolic_upper_half_plane(), p);
  EXPECT_NEAR(c2.riem_lowered(0, 1, 0, 1), -1.0 / std::pow(2.5, 4), 1e-13);
}

TEST(Riemann, ConstantSectionalCurvature) {
  std::mt19937_64 rng(3);
  struct Case {
    TargetPtr t;
    double k;
  };
  for (const auto& [t, k] : {Case{hyperbolic_upper_half_plane(), -1.0},
                             Case{hyperbolic_cylinder(), -1.0}, Case{unit_sphere(), 1.0}}) {
    for (int s = 0; s < 25; ++s) {
      const TPoint p = t->sample_point(rng);
      const auto c = riemann(*t, p);
      const double det = t->h(p).determinant();
      EXPECT_NEAR(c.riem_lowered(0, 1, 0, 1) / det, k, 1e-12) << t->name;
    }
  }
}

TEST(Riemann, SymmetriesAtRandomPoints) {
  std::mt19937_64 rng(5);
  for (const auto& t : analytic_targets()) {
    for (int s = 0; s < 100; ++s) {
      const auto r = riemann(*t, t->sample_point(rng)).riem_lowered;
      const int d = t->dim;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
              EXPECT_NEAR(r(i, j, k, l), -r(j, i, k, l), 1e-10);
              EXPECT_NEAR(r(i, j, k, l), -r(i, j, l, k), 1e-10);
              EXPECT_NEAR(r(i, j, k, l), r(k, l, i, j), 1e-10);
              EXPECT_NEAR(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k), 0.0, 1e-10);
            }
    }
  }
}

TEST(Riemann, FiniteDifferenceOrder) {
  std::mt19937_64 rng(9);
  for (const auto& t : analytic_targets()) {
    if (t->flat) continue;
    const TPoint p = t->sample_point(rng);
    const auto exact = riemann(*t, p).riem_lowered;
    std::vector<double> errs;
    for (double step : {4e-2, 2e-2, 1e-2, 5e-3}) {
      const auto fd = riemann_fd(*t, p, step);
      double e = 0.0;
      for (std::size_t q = 0; q < fd.v.size(); ++q) e = std::max(e, std::abs(fd.v[q] - exact.v[q]));
      errs.push_back(e);
    }
    for (double o : observed_orders(errs)) EXPECT_GE(o, 1.9) << t->name;
  }
}

TEST(Quadform, FlatIsZero) {
  EXPECT_EQ(complexified_quadform(*flat_plane(), pt(0, 0), cvec({1.0, kI}), cvec({2.0, 1.0})),
            0.0);
}

TEST(Quadform, HyperbolicRealPlaneNegative) {
  const double q =
      complexified_quadform(*hyperbolic_upper_half_plane(), pt(0.0, 1.0), cvec({1.0, 0.0}),
                            cvec({0.0, 1.0}));
  EXPECT_NEAR(q, -1.0, 1e-13);
}

TEST(Quadform, ConstantCurvatureWedgeFormula) {
  const auto t = hyperbolic_upper_half_plane();
  for (const auto& s : random_samples(*t, 200, 17)) {
    const double q = complexified_quadform(*t, s.p, s.x, s.y);
    EXPECT_NEAR(q, -wedge_norm_sq(t->h(s.p), s.x, s.y), 1e-9 * (1.0 + std::abs(q)));
  }
}

TEST(Quadform, ParallelPairVanishes) {
  std::mt19937_64 rng(19);
  for (const auto& t : analytic_targets()) {
    const TPoint p = t->sample_point(rng);
    TCVec x(t->dim);
    for (int i = 0; i < t->dim; ++i) x(i) = cplx(0.3 * i + 0.1, -0.2 * i);
    EXPECT_NEAR(complexified_quadform(*t, p, x, cplx(0.7, -1.3) * x), 0.0, 1e-12) << t->name;
  }
}

TEST(Quadform, RealRestrictionMatchesSectionalNumerator) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  for (const auto& t : analytic_targets()) {
    for (int s = 0; s < 20; ++s) {
      const TPoint p = t->sample_point(rng);
      TPoint x(t->dim), y(t->dim);
      for (int i = 0; i < t->dim; ++i) {
        x(i) = n01(rng);
        y(i) = n01(rng);
      }
      const auto r = riemann(*t, p).riem_lowered;
      EXPECT_NEAR(complexified_quadform(r, x.cast<cplx>(), y.cast<cplx>()),
                  sectional_numerator(r, x, y), 1e-12);
    }
  }
}

TEST(Condition, FlatNonStrictOnly) {
  const auto t = flat_plane();
  const auto samples = random_samples(*t, 1000, 1);
  const auto weak = check_curvature_condition(*t, samples, false);
  const auto strict = check_curvature_condition(*t, samples, true);
  EXPECT_EQ(weak.max_value, 0.0);
  EXPECT_TRUE(weak.pass);
  EXPECT_FALSE(strict.pass);
}

TEST(Condition, HyperbolicStrict) {
  const auto t = hyperbolic_upper_half_plane();
  const auto samples = random_samples(*t, 1000, 2, 0.1);
  EXPECT_GE(samples.size(), 1000u);
  const auto rep = check_curvature_condition(*t, samples, true);
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.min_wedge, 0.1);
  EXPECT_LT(rep.max_value, 0.0);
}

TEST(Condition, SphereFailsWithWitness) {
  const auto t = unit_sphere();
  const auto samples = random_samples(*t, 1000, 3);
  const auto rep = check_curvature_condition(*t, samples, false);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_value, 0.0);
  EXPECT_NEAR(complexified_quadform(*t, rep.witness.p, rep.witness.x, rep.witness.y),
              rep.max_value, 1e-12);
}

TEST(Condition, ProductOfHyperbolicIsNonStrict) {
  const auto t = make_target("product:hyperbolic-upper-half-plane,hyperbolic-cylinder");
  const auto samples = random_samples(*t, 500, 4);
  const auto weak = check_curvature_condition(*t, samples, false);
  EXPECT_TRUE(weak.pass);
  // mixed planes are flat, so a strict check cannot pass on all planes
  std::mt19937_64 rng(1);
  std::vector<CurvatureSample> mixed(1);
  mixed[0].p = t->sample_point(rng);
  mixed[0].x = cvec({1.0, 0.0, 0.0, 0.0});
  mixed[0].y = cvec({0.0, 0.0, 1.0, 0.0});
  EXPECT_FALSE(check_curvature_condition(*t, mixed, true).pass);
}

TEST(Condition, EmptySamplerRejected) {
  std::vector<CurvatureSample> none;
  EXPECT_THROW(check_curvature_condition(*flat_plane(), none, false), InvalidInputError);
}

TEST(Registry, NamesResolve) {
  EXPECT_EQ(make_target("flat-torus-R2")->dim, 2);
  EXPECT_EQ(make_target("product:flat-torus-R2,flat-torus-R2")->dim, 4);
  EXPECT_TRUE(make_target("product:flat-torus-R2,flat-torus-R2")->flat);
  EXPECT_THROW(make_target("klein-bottle"), InvalidInputError);
}

TEST(ExpMap, StaysOnGeodesicsAndMatchesFirstOrder) {
  std::mt19937_64 rng(29);
  for (const auto& t : analytic_targets()) {
    const TPoint p = t->sample_point(rng);
    TPoint v(t->dim);
    for (int i = 0; i < t->dim; ++i) v(i) = 0.1 * (i + 1);
    const double s = 1e-5;
    const TPoint q = t->exp(p, s * v);
    EXPECT_LT(((q - p) / s - v).norm(), 1e-4) << t->name;
    // speed is preserved: length of exp_p(v) curve equals |v|
    const TPoint q1 = t->exp(p, v);
    const TPoint q2 = t->exp(p, (1.0 + 1e-6) * v);
    const TPoint vel = (q2 - q1) / 1e-6;
    const double speed = std::sqrt(vel.dot(t->h(q1) * vel));
    EXPECT_NEAR(speed, std::sqrt(v.dot(t->h(p) * v)), 1e-5) << t->name;
  }
}

TEST(ComplexStructure, OrthogonalAndSquaresToMinusOne) {
  std::mt19937_64 rng(31);
  for (const auto& t : analytic_targets()) {
    if (!t->is_kahler()) continue;
    const TPoint p = t->sample_point(rng);
    const TMatrix j = t->complex_structure(p);
    const TMatrix h = t->h(p);
    EXPECT_LT((j * j + TMatrix::Identity(t->dim, t->dim)).norm(), 1e-13);
    EXPECT_LT((j.transpose() * h * j - h).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace kahler::geom
