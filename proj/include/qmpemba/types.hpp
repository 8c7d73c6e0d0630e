#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qmpemba {

using Complex = std::complex<double>;

// Dense operator on the D-dimensional spin Hilbert space (or any square
// complex matrix, including superoperators of size D^2).
using Operator = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// max_ij |A - A^dagger|
inline double hermiticity_defect(const Operator& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// Column-stacking vectorization: vec(X)[i + D*j] = X(i, j).
inline CVector vectorize(const Operator& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

inline Operator unvectorize(const CVector& v, Eigen::Index dim) {
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

}  // namespace qmpemba
