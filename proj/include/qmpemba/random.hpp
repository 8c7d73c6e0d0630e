#pragma once

#include <random>

#include "qmpemba/types.hpp"

namespace qmpemba {

using Rng = std::mt19937_64;

inline Operator random_matrix(long d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator a(d, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < d; ++i) a(i, j) = Complex(n(rng), n(rng));
  return a;
}

inline Operator random_hermitian(long d, Rng& rng) {
  const Operator a = random_matrix(d, rng);
  return 0.5 * (a + a.adjoint());
}

/// Ginibre-distributed full-rank density matrix.
inline Operator random_density(long d, Rng& rng) {
  const Operator a = random_matrix(d, rng);
  Operator rho = a * a.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline CVector random_pure(long d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector psi(d);
  for (long i = 0; i < d; ++i) psi(i) = Complex(n(rng), n(rng));
  return psi.normalized();
}

}  // namespace qmpemba
