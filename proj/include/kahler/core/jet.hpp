#pragma once

#include <array>
#include <cassert>
#include <complex>

#include "kahler/core/types.hpp"

namespace kahler {

/// Second-order Taylor jet of a complex function of up to six independent
/// complex variables. Holomorphic coordinates and their conjugates are treated
/// as independent variables (Wirtinger calculus), so d2(u, v) between a
/// coordinate and a conjugate coordinate is the mixed derivative d_u d_vbar.
class Jet {
 public:
  static constexpr int kMaxVars = 6;

  Jet() = default;
  Jet(double c) : v_(c) {}  // NOLINT(google-explicit-constructor)
  Jet(cplx c) : v_(c) {}    // NOLINT(google-explicit-constructor)

  static Jet variable(cplx value, int index, int nvars) {
    assert(index >= 0 && index < nvars && nvars <= kMaxVars);
    Jet j(value);
    j.nv_ = nvars;
    j.g_[index] = 1.0;
    return j;
  }

  int nvars() const { return nv_; }
  cplx value() const { return v_; }
  cplx d(int i) const { return i < nv_ ? g_[i] : cplx{}; }
  cplx d2(int i, int j) const {
    if (i >= nv_ || j >= nv_) return {};
    return h_[packed(i, j)];
  }

  Jet& operator+=(const Jet& o) {
    widen(o.nv_);
    v_ += o.v_;
    for (int i = 0; i < o.nv_; ++i) g_[i] += o.g_[i];
    for (int k = 0; k < hsize(o.nv_); ++k) h_[k] += o.h_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    widen(o.nv_);
    v_ -= o.v_;
    for (int i = 0; i < o.nv_; ++i) g_[i] -= o.g_[i];
    for (int k = 0; k < hsize(o.nv_); ++k) h_[k] -= o.h_[k];
    return *this;
  }
  Jet& operator*=(cplx s) {
    v_ *= s;
    for (int i = 0; i < nv_; ++i) g_[i] *= s;
    for (int k = 0; k < hsize(nv_); ++k) h_[k] *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  Jet operator-() const {
    Jet r = *this;
    r *= cplx(-1.0);
    return r;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= cplx(s); }
  friend Jet operator*(double s, Jet a) { return a *= cplx(s); }
  friend Jet operator/(Jet a, cplx s) { return a *= (1.0 / s); }
  friend Jet operator/(Jet a, double s) { return a *= cplx(1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.nv_ = a.nv_ > b.nv_ ? a.nv_ : b.nv_;
    r.v_ = a.v_ * b.v_;
    for (int i = 0; i < r.nv_; ++i) r.g_[i] = a.v_ * b.g_[i] + b.v_ * a.g_[i];
    for (int i = 0; i < r.nv_; ++i) {
      for (int j = i; j < r.nv_; ++j) {
        const int k = packed(i, j);
        r.h_[k] = a.v_ * b.h_[k] + b.v_ * a.h_[k] + a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i];
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator/(cplx s, const Jet& b) { return reciprocal(b) * s; }
  friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

  /// Composition with a scalar function given its value and first two
  /// derivatives at value().
  Jet compose(cplx f0, cplx f1, cplx f2) const {
    Jet r;
    r.nv_ = nv_;
    r.v_ = f0;
    for (int i = 0; i < nv_; ++i) r.g_[i] = f1 * g_[i];
    for (int i = 0; i < nv_; ++i) {
      for (int j = i; j < nv_; ++j) {
        const int k = packed(i, j);
        r.h_[k] = f1 * h_[k] + f2 * g_[i] * g_[j];
      }
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const cplx inv = 1.0 / a.v_;
    return a.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 private:
  static constexpr int packed(int i, int j) {
    if (i > j) {
      const int t = i;
      i = j;
      j = t;
    }
    // row-major upper triangle of a kMaxVars x kMaxVars matrix
    return i * kMaxVars - i * (i - 1) / 2 + (j - i);
  }
  static constexpr int hsize(int nv) { return nv == 0 ? 0 : packed(nv - 1, nv - 1) + 1; }
  void widen(int nv) {
    if (nv > nv_) nv_ = nv;
  }

  int nv_ = 0;
  cplx v_{};
  std::array<cplx, kMaxVars> g_{};
  std::array<cplx, kMaxVars*(kMaxVars + 1) / 2> h_{};
};

inline Jet sin(const Jet& a) {
  const cplx s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s);
}
inline Jet cos(const Jet& a) {
  const cplx s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c);
}
inline Jet exp(const Jet& a) {
  const cplx e = std::exp(a.value());
  return a.compose(e, e, e);
}
inline Jet sinh(const Jet& a) {
  const cplx s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(s, c, s);
}
inline Jet cosh(const Jet& a) {
  const cplx s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(c, s, c);
}
inline Jet sqrt(const Jet& a) {
  const cplx r = std::sqrt(a.value());
  return a.compose(r, 0.5 / r, -0.25 / (r * a.value()));
}

}  // namespace kahler
