#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "kahler/core/types.hpp"

namespace kahler {

/// Element of the exterior algebra over a basis of at most six 1-forms, with
/// complex coefficients. Monomials are indexed by the bitmask of the basis
/// 1-forms they contain, in increasing basis order.
///
/// For a chart with m holomorphic coordinates the basis is laid out as
/// dz^1, dzbar^1, dz^2, dzbar^2, ... (see holo/antiholo).
class Form {
 public:
  static constexpr int kMaxBasis = 6;

  explicit Form(int nbasis) : nb_(nbasis) {}

  static Form one(int nbasis) {
    Form f(nbasis);
    f.c_[0] = 1.0;
    return f;
  }
  static Form basis(int nbasis, int i) {
    Form f(nbasis);
    f.c_[1u << i] = 1.0;
    return f;
  }
  static int holo(int alpha) { return 2 * alpha; }
  static int antiholo(int alpha) { return 2 * alpha + 1; }

  int nbasis() const { return nb_; }
  cplx& operator[](std::uint32_t mask) { return c_[mask]; }
  cplx operator[](std::uint32_t mask) const { return c_[mask]; }

  /// Coefficient of the top-degree monomial e^1 ^ ... ^ e^nbasis.
  cplx top() const { return c_[(1u << nb_) - 1]; }

  Form& operator+=(const Form& o) {
    for (std::uint32_t m = 0; m < size(); ++m) c_[m] += o.c_[m];
    return *this;
  }
  Form& operator*=(cplx s) {
    for (std::uint32_t m = 0; m < size(); ++m) c_[m] *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator*(cplx s, Form a) { return a *= s; }

  Form wedge(const Form& o) const {
    Form r(nb_);
    for (std::uint32_t a = 0; a < size(); ++a) {
      if (c_[a] == cplx{}) continue;
      for (std::uint32_t b = 0; b < size(); ++b) {
        if ((a & b) != 0u || o.c_[b] == cplx{}) continue;
        r.c_[a | b] += static_cast<double>(sign(a, b)) * c_[a] * o.c_[b];
      }
    }
    return r;
  }

  /// w^k / k!
  Form power_over_factorial(int k) const {
    Form r = one(nb_);
    for (int i = 1; i <= k; ++i) r = (1.0 / static_cast<double>(i)) * r.wedge(*this);
    return r;
  }

 private:
  std::uint32_t size() const { return 1u << nb_; }

  // Sign of reordering e^A ^ e^B into increasing order: one transposition per
  // pair (i in A, j in B) with i > j.
  static int sign(std::uint32_t a, std::uint32_t b) {
    int swaps = 0;
    for (std::uint32_t bb = b; bb != 0u; bb &= bb - 1) {
      const int j = std::countr_zero(bb);
      swaps += std::popcount(a >> (j + 1));
    }
    return (swaps & 1) ? -1 : 1;
  }

  int nb_;
  std::array<cplx, 1u << kMaxBasis> c_{};
};

/// The real (1,1)-form i * sum G(a,b) dz^a ^ dzbar^b on an m-dimensional chart.
inline Form hermitian_two_form(const HMatrix& g) {
  const int m = static_cast<int>(g.rows());
  Form w(2 * m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      w += (kI * g(a, b)) *
           Form::basis(2 * m, Form::holo(a)).wedge(Form::basis(2 * m, Form::antiholo(b)));
    }
  }
  return w;
}

}  // namespace kahler
