#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kahler/core/types.hpp"
#include "kahler/geom/target_metric.hpp"

namespace kahler::geom {

/// Dense rank-4 array over a target of dimension <= kMaxTargetDim.
struct Tensor4 {
  int dim = 0;
  std::array<double, kMaxTargetDim * kMaxTargetDim * kMaxTargetDim * kMaxTargetDim> v{};

  double& operator()(int a, int b, int c, int d) { return v[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return v[index(a, b, c, d)]; }

 private:
  static int index(int a, int b, int c, int d) {
    return ((a * kMaxTargetDim + b) * kMaxTargetDim + c) * kMaxTargetDim + d;
  }
};

/// Gamma^k_ij stored as upper[k](i, j).
struct Christoffel {
  int dim = 0;
  std::array<TMatrix, kMaxTargetDim> upper;

  double operator()(int k, int i, int j) const { return upper[k](i, j); }
  /// Gamma^k_ij X^i Y^j for complex vectors.
  TCVec contract(const TCVec& x, const TCVec& y) const;
};

/// Curvature data at one point. Conventions:
///   riem_mixed(l, k, i, j) = R^l_kij, the components of R(d_i, d_j) d_k with
///   R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y];
///   riem_lowered(i, j, k, l) = R(d_i, d_j, d_k, d_l) = h(R(d_i, d_j) d_l, d_k),
/// so R(X, Y, X, Y) = K |X ^ Y|^2 and the hyperbolic plane has R_1212 = -det h.
struct CurvatureAtPoint {
  Christoffel gamma;
  Tensor4 riem_mixed;
  Tensor4 riem_lowered;
};

Christoffel christoffel(const TargetMetric& metric, const TPoint& p);
CurvatureAtPoint riemann(const TargetMetric& metric, const TPoint& p);

/// Lowered curvature from central differences of christoffel() with the given
/// step; independent of the analytic second derivatives of h.
Tensor4 riemann_fd(const TargetMetric& metric, const TPoint& p, double step);

/// R(X, Y, Z, W) by multilinear extension of the lowered tensor.
cplx curvature_form(const Tensor4& lowered, const TCVec& x, const TCVec& y, const TCVec& z,
                    const TCVec& w);

/// R^N(X, Y, conj X, conj Y). The imaginary part is checked to vanish and
/// dropped.
double complexified_quadform(const TargetMetric& metric, const TPoint& p, const TCVec& x,
                             const TCVec& y);
double complexified_quadform(const Tensor4& lowered, const TCVec& x, const TCVec& y);

/// Sectional numerator R_ijkl X^i Y^j X^k Y^l for real vectors.
double sectional_numerator(const Tensor4& lowered, const TPoint& x, const TPoint& y);

/// |X ^ Y|^2 = |X|^2 |Y|^2 - |h(X, conj Y)|^2 for complex tangent vectors.
double wedge_norm_sq(const TMatrix& h, const TCVec& x, const TCVec& y);

/// Complex bilinear extension of h.
inline cplx bilinear(const TMatrix& h, const TCVec& x, const TCVec& y) {
  return x.transpose() * h.cast<cplx>() * y;
}

struct CurvatureSample {
  TPoint p;
  TCVec x;
  TCVec y;
};

/// Deterministic Monte-Carlo sampler for the complexified sectional curvature
/// condition. Pairs with |X ^ Y| below min_wedge are rejected.
std::vector<CurvatureSample> random_samples(const TargetMetric& metric, std::size_t count,
                                            std::uint64_t seed, double min_wedge = 0.0);

struct ConditionReport {
  std::string target;
  bool strict = false;
  double margin = 0.0;
  std::size_t samples = 0;
  double max_value = 0.0;  // max over samples of R(X, Y, conj X, conj Y)
  double min_wedge = 0.0;  // smallest |X ^ Y| among the samples
  CurvatureSample witness;
  bool pass = false;
};

/// Sampling certificate for R(X, Y, conj X, conj Y) <= 0 (non-strict) or
/// < -margin (strict). Not a proof.
ConditionReport check_curvature_condition(const TargetMetric& metric,
                                          std::span<const CurvatureSample> samples, bool strict,
                                          double margin = 1e-9);

}  // namespace kahler::geom
