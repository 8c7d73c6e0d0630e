#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmpemba/spectral.hpp"

namespace qmpemba {

/// rho_0 = |down ... down><down ... down|
Operator initial_state(const ChainParams& p);

/// chi(theta, phi) = |tr(l2 U rho_0 U^dag)|, evaluated on the rotated product state.
double chi_overlap(const Operator& l2, const ChainParams& p, double theta, double phi);

/// Angle-grid scan of chi with the acceleration mask chi <= epsilon.
/// Arrays are row-major with theta as the slow index.
struct OverlapMap {
  std::vector<double> grid_theta;  ///< cell midpoints in [0, pi]
  std::vector<double> grid_phi;    ///< cell midpoints in [0, 2 pi)
  std::vector<double> chi;
  std::vector<unsigned char> mask;
  double epsilon = 0.0;
  double area = 0.0;

  std::size_t n_theta() const { return grid_theta.size(); }
  std::size_t n_phi() const { return grid_phi.size(); }
  double chi_at(std::size_t it, std::size_t ip) const { return chi[it * n_phi() + ip]; }
  bool masked(std::size_t it, std::size_t ip) const { return mask[it * n_phi() + ip] != 0; }
};

/// Uniform midpoint grid. Uses the reduction of l2 onto excitation-number
/// blocks, which is exact for the global rotation of the all-down state.
OverlapMap scan_angles(const Operator& l2, const ChainParams& p, int n_theta, int n_phi);

/// Scan with the slowest mode of a gap report.
OverlapMap scan_angles(const SpectralData& sd, const GapReport& gap, const ChainParams& p,
                       int n_theta, int n_phi);

/// Re-thresholds an existing map at a different epsilon.
OverlapMap with_threshold(OverlapMap map, double epsilon);

/// A = (1/4pi) sum sin(theta) Theta[eps - chi] dtheta dphi, clamped to [0, 1].
double area(const OverlapMap& map);

/// Area of a mask given row counts; shared with CSV round-trip checks.
double area_from_rows(const std::vector<double>& theta, const std::vector<std::size_t>& row_counts,
                      std::size_t n_phi);

struct HermitizedMode {
  Operator mode;
  Operator right;  ///< paired right mode rescaled so tr(mode right) = 1 (if supplied)
  Complex phase{1.0, 0.0};  ///< mode = hermitian part of phase * input
  double defect_before = 0.0;  ///< hermiticity defect of phase * input
};

/// Finds the global phase making l2 hermitian, applies it and symmetrizes.
/// The sign is fixed so the eigenvalue of largest magnitude is positive.
/// Throws MpembaError("left mode not phase-hermitizable") when the remaining
/// defect exceeds 1e-6 (relative to the largest entry).
HermitizedMode hermitize_left_mode(const Operator& l2);
HermitizedMode hermitize_left_mode(const Operator& l2, const Operator& r2);

struct IdealUnitaryResult {
  Operator unitary;
  double s = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  CVector phi1;
  CVector phi2;
  double residual_overlap = 0.0;
  bool used_zero_eigenvalue = false;
  Operator l2;  ///< hermitized left mode the construction used
};

/// Ideal unitary for a given hermitian left mode and pure initial state
/// |psi0><psi0|. (alpha1, alpha2) are the negative and positive eigenvalues of
/// smallest magnitude.
IdealUnitaryResult ideal_unitary_for_mode(const Operator& l2_hermitian, const CVector& psi0);

/// Ideal unitary for the slowest mode of `gap` at the all-down initial state.
/// Throws MpembaError for a conjugate-pair or degenerate gap.
IdealUnitaryResult ideal_unitary(const SpectralData& sd, const GapReport& gap,
                                 const ChainParams& p);

struct InterpolationPoint {
  double s = 0.0;
  double overlap = 0.0;    ///< tr(l2 U(s) rho0 U(s)^dag)
  double predicted = 0.0;  ///< alpha1 cos^2 s + alpha2 sin^2 s
};

/// Overlap along the one-parameter family U(s) = mixing(s) R on `n_points`
/// equally spaced s in [0, pi/2].
std::vector<InterpolationPoint> interpolation_check(const IdealUnitaryResult& res,
                                                    const CVector& psi0, int n_points);

/// exp[-i s (|phi1><phi2| + |phi2><phi1|)]
Operator mixing_unitary(const CVector& phi1, const CVector& phi2, double s);

/// Unitary acting as a plane rotation in span{|from>, |to>} with R|from> = |to>.
Operator plane_rotation(const CVector& from, const CVector& to);

// ---------------------------------------------------------------------------
// Omega-V plane sweeps

struct Axis {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
  std::vector<double> values() const;
};

enum class CellStatus { ok, pairing_failure, degenerate_stationary, no_gap, error };

const char* to_string(CellStatus s);

struct CellResult {
  double alpha = 0.0;
  double omega = 0.0;
  double v = 0.0;
  CellStatus status = CellStatus::ok;
  std::string message;
  GapReport gap;
  double area = 0.0;
  bool from_cache = false;
};

/// Spectral summary reused across sweeps; epsilon does not enter it.
struct CellSpectrum {
  CellStatus status = CellStatus::ok;
  std::string message;
  GapReport gap;
  Operator l2;
};

/// Per-cell spectral pipeline: assemble, decompose, classify, restricted gap.
CellSpectrum compute_cell_spectrum(const ChainParams& p);

class SpectrumCache;

struct SweepOptions {
  int n_theta = 180;
  int n_phi = 360;
  int workers = 1;
  SpectrumCache* cache = nullptr;
};

struct SweepStats {
  std::size_t cells = 0;
  std::size_t cache_hits = 0;
  std::size_t decompositions = 0;
  std::size_t failures = 0;
};

struct PlaneSweep {
  std::vector<double> omega_axis;
  std::vector<double> v_axis;
  double alpha = 0.0;
  std::vector<CellResult> cells;  ///< omega-major: cells[io * v_axis.size() + iv]
  SweepStats stats;

  const CellResult& at(std::size_t io, std::size_t iv) const {
    return cells[io * v_axis.size() + iv];
  }
};

/// Evaluates every (omega, v) cell with `base` supplying N, alpha, gamma and
/// epsilon. Cells are independent; results do not depend on the worker count.
PlaneSweep plane_sweep(const ChainParams& base, const std::vector<double>& omega_axis,
                       const std::vector<double>& v_axis, const SweepOptions& opt);

}  // namespace qmpemba
