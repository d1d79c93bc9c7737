#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kahler/core/types.hpp"

namespace kahler {

/// Neumaier-compensated running sum. Accumulation order is the caller's loop
/// order, so results are reproducible bit for bit.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Observed convergence orders log2(e_k / e_{k+1}) for errors measured on
/// successively halved step sizes.
inline std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    orders.push_back(std::log2(errors[k] / errors[k + 1]));
  }
  return orders;
}

/// Inverse of a Hermitian positive matrix in the index convention used
/// throughout: P(a,b) = g^{a bbar}, defined by sum_b g^{a bbar} g_{c bbar} =
/// delta^a_c, i.e. P = (G^T)^{-1}.
inline HMatrix inverse_metric(const HMatrix& g) { return g.transpose().inverse(); }

/// Unitary frame Z_a = sum_mu E(mu,a) d/dz^mu with g(Z_a, conj Z_b) = delta_ab,
/// obtained from the Cholesky factor g = L L^*.
inline HMatrix unitary_frame(const HMatrix& g) {
  Eigen::LLT<HMatrix> llt(g);
  const HMatrix l = llt.matrixL();
  return l.transpose().inverse();
}

}  // namespace kahler
