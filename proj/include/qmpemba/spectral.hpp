#pragma once

#include <string>
#include <vector>

#include "qmpemba/model.hpp"

namespace qmpemba {

enum class Sector { symmetric, other, unclassified };

const char* to_string(Sector s);

struct ModeResidual {
  double eigen = 0.0;   ///< ||M r - lambda r|| with ||r||_F = 1
  double biorth = 0.0;  ///< |tr(l r) - 1|
  double trace = 0.0;   ///< |tr r| for decaying modes, |tr rho_SS - 1| for the stationary one
};

/// Complete biorthogonal eigensystem of a generator.
///
/// Modes are sorted by |Re lambda| ascending; the stationary mode comes first.
/// Right modes are stored as vec(r_k) in the columns of `right`, left modes as
/// the row vectors w_k with tr(l_k rho) = w_k^T vec(rho) in the columns of
/// `left`. Pairs are normalized so that tr(l_k r_k) = 1 and ||r_k||_F = 1.
struct SpectralData {
  long dim_hilbert = 0;
  std::vector<Complex> eigenvalues;
  Operator right;
  Operator left;
  std::vector<ModeResidual> residuals;
  std::vector<Sector> sectors;
  Operator stationary;  ///< trace-normalized, hermitized rho_SS (empty if not unique)
  int zero_modes = 0;

  std::size_t size() const { return eigenvalues.size(); }
  Operator right_mode(std::size_t k) const;
  Operator left_mode(std::size_t k) const;
  /// tr(l_k rho) via the stored row vector.
  Complex coefficient(std::size_t k, const Operator& rho) const;
};

struct DecomposeOptions {
  double cluster_tol = 1e-8;
  double zero_tol = 1e-9;
  /// Largest acceptable condition number of a cluster's left/right Gram matrix.
  double max_cluster_condition = 1e8;
};

/// Full eigendecomposition with left/right pairing.
/// Throws SpectralError when a degenerate cluster cannot be biorthogonalized.
SpectralData eigendecompose(const Generator& g, const DecomposeOptions& opt = {});

/// Deterministic ordering key: |Re| then Im on a 1e-9 grid, then exact values.
bool spectral_order_less(Complex a, Complex b);

/// Hermitized, trace-normalized right zero mode.
/// Throws SpectralError("degenerate stationary manifold") unless exactly one
/// eigenvalue has |lambda| < 1e-9.
Operator stationary_state(const SpectralData& sd);

/// Index permutation of the computational basis induced by a site permutation
/// (perm[s] = image site of site s, 0-based).
std::vector<long> basis_permutation(int n_spins, const std::vector<int>& site_perm);

/// Generators of the chain's symmetry group: the reflection, plus all adjacent
/// transpositions when alpha == 0.
std::vector<std::vector<int>> symmetry_generators(const ChainParams& p);

/// All group elements (full S_N when alpha == 0, {id, reflection} otherwise).
std::vector<std::vector<int>> symmetry_group(const ChainParams& p);

/// Group average of g r g^T over `symmetry_group(p)`.
Operator symmetrize(const Operator& r, const ChainParams& p);

/// Fills `sd.sectors`. Inside degenerate clusters the basis is rotated so that
/// each mode lies in one sector; modes that cannot be separated stay
/// `unclassified`.
void classify_sector(SpectralData& sd, const ChainParams& p);

struct GapReport {
  Complex lambda2{};
  Complex lambda3{};
  double tau2 = 0.0;
  double tau3 = 0.0;
  double ratio = 0.0;  ///< tau3 / tau2
  bool gap_is_complex = false;
  bool degenerate_gap = false;
  int multiplicity = 0;  ///< eligible modes at lambda2 (excluding its conjugate)
  std::size_t index2 = 0;
  std::size_t index3 = 0;
  bool restricted = false;
  int unclassified_skipped = 0;  ///< unclassified modes ranked before lambda3
};

/// Slowest and second slowest decay channels. A complex-conjugate pair counts
/// as one channel. Throws SpectralError if fewer than two channels are eligible.
GapReport gap_report(const SpectralData& sd, bool restrict_to_symmetric);

/// max_{j,k} |tr(l_j r_k) - delta_jk|
double biorthogonality_defect(const SpectralData& sd);

}  // namespace qmpemba
