#pragma once

#include <vector>

#include "qmpemba/types.hpp"

namespace qmpemba {

enum class Boundary { open };

/// Physical parameters of the dissipative power-law Ising chain.
/// Rates and energies are in units of gamma.
struct ChainParams {
  int n_spins = 1;
  double omega = 0.0;   ///< transverse field
  double v = 0.0;       ///< interaction strength
  double alpha = 0.0;   ///< power-law exponent of the interaction
  double gamma = 1.0;   ///< single-spin decay rate
  double epsilon = 1e-2;  ///< overlap threshold for the acceleration mask
  Boundary boundary = Boundary::open;

  long hilbert_dim() const { return 1L << n_spins; }
  long liouville_dim() const { return hilbert_dim() * hilbert_dim(); }
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ChainParams& p);

enum class PauliAxis { x, y, z, plus, minus };

/// Single-site operators in the basis {0: up, 1: down}; sigma^- = |down><up|.
Operator pauli(PauliAxis axis);

/// Embeds a 2x2 operator at site k (1-based) of an n-site chain.
/// Site 1 is the most significant tensor factor.
Operator embed(const Operator& op, int site, int n_spins);

Operator build_hamiltonian(const ChainParams& p);

/// L_k = sqrt(gamma) sigma^-_k for k = 1..N.
std::vector<Operator> build_jump_ops(const ChainParams& p);

enum class Vectorization { column_stacking };

/// Lindblad generator W as a dense D^2 x D^2 matrix acting on vec(rho).
/// The Hamiltonian and jump operators are kept so the generator can be
/// evaluated directly in operator form.
struct Generator {
  long dim_hilbert = 0;
  Operator matrix;
  Vectorization convention = Vectorization::column_stacking;
  Operator hamiltonian;
  std::vector<Operator> jumps;
};

/// M = -i(I (x) H - H^T (x) I)
///     + sum_k [ conj(L_k) (x) L_k - 1/2 I (x) L_k^dag L_k - 1/2 (L_k^dag L_k)^T (x) I ]
Generator assemble_generator(const Operator& hamiltonian,
                             const std::vector<Operator>& jumps);

/// Convenience: hamiltonian + jumps + assembly.
Generator build_generator(const ChainParams& p);

/// W[rho] via the matrix-vector product.
Operator apply_generator(const Generator& g, const Operator& rho);

/// W[rho] from the commutator/dissipator form, without the superoperator.
Operator apply_generator_direct(const Generator& g, const Operator& rho);

/// Dual map W^dag[A] = i[H,A] + sum_k (L_k^dag A L_k - 1/2 {L_k^dag L_k, A}),
/// so that tr(A W[rho]) = tr(W^dag[A] rho).
Operator apply_adjoint(const Generator& g, const Operator& obs);

/// U(theta, phi) = prod_k exp(i phi sigma^z_k / 2) exp(i theta sigma^y_k / 2).
Operator rotation_unitary(const ChainParams& p, double theta, double phi);

/// Single-site factor exp(i phi sigma^z / 2) exp(i theta sigma^y / 2).
Operator single_site_rotation(double theta, double phi);

/// U(theta, phi) |down ... down> as a product-state vector.
CVector rotated_all_down(int n_spins, double theta, double phi);

}  // namespace qmpemba
