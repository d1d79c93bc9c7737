#pragma once

#include <complex>

#include <Eigen/Dense>

namespace kahler {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

// Target manifolds in this library have real dimension <= 4 (products of two
// surfaces). Fiber charts have complex dimension <= 2, so the total space of a
// family has at most 3 holomorphic coordinates.
inline constexpr int kMaxTargetDim = 4;
inline constexpr int kMaxFiberDim = 2;
inline constexpr int kMaxHolo = kMaxFiberDim + 1;

// Bounded-size Eigen types: dynamic extent, fixed maximum, no heap traffic.
using TPoint = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxTargetDim, 1>;
using TMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxTargetDim, kMaxTargetDim>;
using TCVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, kMaxTargetDim, 1>;
using HMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxHolo, kMaxHolo>;

}  // namespace kahler
