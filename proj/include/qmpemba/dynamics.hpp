#pragma once

#include <utility>
#include <vector>

#include "qmpemba/spectral.hpp"

namespace qmpemba {

enum class PropagationMethod { spectral_reconstruction, exponential_integrator };

const char* to_string(PropagationMethod m);

struct Trajectory {
  std::vector<double> times;       ///< units of 1/gamma
  std::vector<Operator> states;    ///< empty unless retained
  std::vector<double> distances;   ///< trace distance to rho_SS
  PropagationMethod method = PropagationMethod::exponential_integrator;
};

struct ReconstructedState {
  Operator state;            ///< hermitized
  double antihermitian = 0.0;  ///< max |rho - rho^dag| / 2 before hermitization
  bool flagged = false;        ///< antihermitian residue above 1e-6
};

/// rho(t) = sum_k tr(l_k rho0) r_k e^{lambda_k t}.
ReconstructedState reconstruct_state(const SpectralData& sd, const Operator& rho0, double t);

/// Mode-sum trajectory over `times`.
Trajectory reconstruct_trajectory(const SpectralData& sd, const Operator& rho0,
                                  const std::vector<double>& times, bool retain_states = false);

struct EvolveOptions {
  bool retain_states = false;
  /// Reference for the distances; computed from the generator's null space if empty.
  Operator stationary;
};

/// Propagates vec(rho) with exp(M dt) between consecutive sample times.
/// Step propagators are reused for equal steps.
Trajectory evolve(const Generator& g, const Operator& rho0, const std::vector<double>& times,
                  const EvolveOptions& opt = {});

/// Stationary state from the linear system M x = 0, tr x = 1, independent of
/// the eigendecomposition.
Operator stationary_state_direct(const Generator& g);

/// 1/2 * sum of singular values of a - b. Throws DynamicsError for inputs
/// whose hermiticity defect exceeds 1e-8.
double trace_distance(const Operator& a, const Operator& b);

struct FitWindow {
  double d_hi = 1e-3;
  double d_lo = 1e-7;
};

/// Least-squares slope of ln d(t) over the samples with d_lo <= d <= d_hi.
/// Throws DynamicsError("window not reached") or when fewer than 5 samples lie
/// inside the window.
double fit_decay_rate(const Trajectory& traj, FitWindow window = {});

/// n samples, log-spaced on [t_max * t_min_fraction, t_max].
std::vector<double> log_times(double t_max, int n, double t_min_fraction = 1e-4);

/// n samples t_max * (k / n), k = 1..n.
std::vector<double> linear_times(double t_max, int n);

/// Angular frequency of the oscillation left after removing the best
/// single-exponential fit from ln d(t), from zero crossings of the residual.
/// Only samples with t >= t_from are used.
double residual_oscillation_frequency(const Trajectory& traj, double t_from);

}  // namespace qmpemba
