#include "qmpemba/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qmpemba/errors.hpp"

namespace qmpemba {

const char* to_string(PropagationMethod m) {
  return m == PropagationMethod::spectral_reconstruction ? "spectral_reconstruction"
                                                          : "exponential_integrator";
}

ReconstructedState reconstruct_state(const SpectralData& sd, const Operator& rho0, double t) {
  if (t < 0.0) throw std::invalid_argument("reconstruct_state: t must be >= 0");
  if (rho0.rows() != sd.dim_hilbert || rho0.cols() != sd.dim_hilbert)
    throw std::invalid_argument("reconstruct_state: dimension mismatch");
  const CVector coeff = sd.left.transpose() * vectorize(rho0);
  CVector weighted(coeff.size());
  for (Eigen::Index k = 0; k < coeff.size(); ++k)
    weighted(k) = coeff(k) * std::exp(sd.eigenvalues[static_cast<std::size_t>(k)] * t);
  const Operator raw = unvectorize(sd.right * weighted, sd.dim_hilbert);
  ReconstructedState out;
  out.antihermitian = 0.5 * hermiticity_defect(raw);
  out.flagged = out.antihermitian > 1e-6;
  out.state = 0.5 * (raw + raw.adjoint());
  return out;
}

Trajectory reconstruct_trajectory(const SpectralData& sd, const Operator& rho0,
                                  const std::vector<double>& times, bool retain_states) {
  const Operator rho_ss = stationary_state(sd);
  Trajectory traj;
  traj.method = PropagationMethod::spectral_reconstruction;
  traj.times = times;
  for (double t : times) {
    const auto rs = reconstruct_state(sd, rho0, t);
    traj.distances.push_back(trace_distance(rs.state, rho_ss));
    if (retain_states) traj.states.push_back(rs.state);
  }
  return traj;
}

Operator stationary_state_direct(const Generator& g) {
  const long d = g.dim_hilbert;
  Operator a = g.matrix;
  // The trace functional is a left null vector of M, so replacing the first
  // row (which it involves) by it removes exactly one redundant equation.
  a.row(0).setZero();
  for (long i = 0; i < d; ++i) a(0, i + d * i) = 1.0;
  CVector rhs = CVector::Zero(d * d);
  rhs(0) = 1.0;
  const CVector x = a.partialPivLu().solve(rhs);
  Operator rho = unvectorize(x, d);
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

namespace {

// exp(m dt) x by a Taylor series on substeps with ||m dt / s||_1 <= 2, so the
// terms never grow past twice the input and roundoff stays near 1e-15.
CVector expm_action(const Operator& m, double m_norm, double dt, const CVector& x) {
  const int substeps = std::max(1, static_cast<int>(std::ceil(m_norm * dt / 2.0)));
  const double h = dt / substeps;
  CVector y = x;
  for (int j = 0; j < substeps; ++j) {
    CVector term = y;
    CVector acc = y;
    double prev = term.cwiseAbs().maxCoeff();
    for (int k = 1; k <= 80; ++k) {
      term = (m * term) * Complex(h / k, 0.0);
      acc += term;
      const double cur = term.cwiseAbs().maxCoeff();
      if (cur + prev <= 1e-17 * acc.cwiseAbs().maxCoeff()) break;
      prev = cur;
    }
    y = acc;
  }
  return y;
}

}  // namespace

Trajectory evolve(const Generator& g, const Operator& rho0, const std::vector<double>& times,
                  const EvolveOptions& opt) {
  const long d = g.dim_hilbert;
  if (rho0.rows() != d || rho0.cols() != d)
    throw std::invalid_argument("evolve: dimension mismatch");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0) throw std::invalid_argument("evolve: times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("evolve: times must be strictly increasing");
  }
  const Operator rho_ss = opt.stationary.size() ? opt.stationary : stationary_state_direct(g);
  const double m_norm = g.matrix.cwiseAbs().colwise().sum().maxCoeff();

  // Steps that agree to 1e-12 relative are the same step.
  auto same_step = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
  std::vector<double> steps;
  double t_last = 0.0;
  for (double t : times) {
    if (t > t_last) steps.push_back(t - t_last);
    t_last = t;
  }
  std::vector<double> sorted = steps;
  std::sort(sorted.begin(), sorted.end());

  // A step length used often enough is worth a full propagator (scaling and
  // squaring, cached); one-off steps apply exp(M dt) to the state directly.
  constexpr std::size_t kReuseThreshold = 8;
  std::map<double, Operator> propagators;
  auto advance = [&](double dt, const CVector& x) -> CVector {
    auto it = propagators.lower_bound(dt * (1.0 - 1e-12));
    if (it != propagators.end() && it->first <= dt * (1.0 + 1e-12)) return it->second * x;
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), dt * (1.0 - 1e-12));
    std::size_t uses = 0;
    for (auto s = lo; s != sorted.end() && same_step(*s, dt); ++s) ++uses;
    if (uses >= kReuseThreshold) {
      Operator step = (g.matrix * Complex(dt, 0.0)).exp();
      return propagators.emplace(dt, std::move(step)).first->second * x;
    }
    return expm_action(g.matrix, m_norm, dt, x);
  };

  Trajectory traj;
  traj.method = PropagationMethod::exponential_integrator;
  traj.times = times;
  CVector state = vectorize(rho0);
  double t_prev = 0.0;
  for (double t : times) {
    const double dt = t - t_prev;
    if (dt > 0.0) state = advance(dt, state);
    t_prev = t;
    Operator rho = unvectorize(state, d);
    rho = 0.5 * (rho + rho.adjoint());
    traj.distances.push_back(trace_distance(rho, rho_ss));
    if (opt.retain_states) traj.states.push_back(std::move(rho));
  }
  return traj;
}

double trace_distance(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const double da = hermiticity_defect(a);
  const double db = hermiticity_defect(b);
  if (da > 1e-8 || db > 1e-8) {
    std::ostringstream os;
    os << "trace_distance: non-hermitian input (defect " << std::max(da, db) << ")";
    throw DynamicsError(os.str());
  }
  const Operator diff = a - b;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (diff + diff.adjoint()),
                                             Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fit_decay_rate(const Trajectory& traj, FitWindow window) {
  if (!(window.d_lo > 0.0) || !(window.d_hi > window.d_lo))
    throw std::invalid_argument("fit_decay_rate: invalid window");
  bool entered = false;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double dist = traj.distances[i];
    if (dist <= window.d_hi) entered = true;
    if (dist > window.d_hi || dist < window.d_lo) continue;
    const double t = traj.times[i];
    const double y = std::log(dist);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (!entered) throw DynamicsError("window not reached");
  if (count < 5)
    throw DynamicsError("fit window holds " + std::to_string(count) +
                        " samples, at least 5 required");
  const double denom = count * stt - st * st;
  return (count * sty - st * sy) / denom;
}

std::vector<double> log_times(double t_max, int n, double t_min_fraction) {
  if (!(t_max > 0.0) || n < 2 || !(t_min_fraction > 0.0 && t_min_fraction < 1.0))
    throw std::invalid_argument("log_times: invalid arguments");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double lo = std::log(t_max * t_min_fraction);
  const double hi = std::log(t_max);
  for (int k = 0; k < n; ++k) out[k] = std::exp(lo + (hi - lo) * k / (n - 1));
  out.back() = t_max;
  return out;
}

std::vector<double> linear_times(double t_max, int n) {
  if (!(t_max > 0.0) || n < 1) throw std::invalid_argument("linear_times: invalid arguments");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[k] = t_max * (k + 1) / n;
  return out;
}

double residual_oscillation_frequency(const Trajectory& traj, double t_from) {
  std::vector<double> t, y;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] >= t_from && traj.distances[i] > 0.0) {
      t.push_back(traj.times[i]);
      y.push_back(std::log(traj.distances[i]));
    }
  if (t.size() < 16) throw DynamicsError("too few samples for an oscillation estimate");
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  const double t_mid = 0.5 * (t.front() + t.back());
  const double half = 0.5 * (t.back() - t.front());
  if (!(half > 0.0)) throw DynamicsError("degenerate time window");

  // Cubic detrend removes the exponential envelope and slow transients.
  Eigen::MatrixXd basis(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (t[static_cast<std::size_t>(i)] - t_mid) / half;
    basis(i, 0) = 1.0;
    basis(i, 1) = x;
    basis(i, 2) = x * x;
    basis(i, 3) = x * x * x;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - basis * coef;
  if (resid.norm() == 0.0) throw DynamicsError("residual shows no oscillation");

  const double pi = std::acos(-1.0);
  const double span = 2.0 * half;
  double min_dt = span;
  for (std::size_t i = 1; i < t.size(); ++i) min_dt = std::min(min_dt, t[i] - t[i - 1]);
  // At least three periods inside the window, below the sampling limit.
  const double w_lo = 6.0 * pi / span;
  const double w_hi = pi / min_dt;
  if (!(w_hi > w_lo)) throw DynamicsError("window too short for an oscillation estimate");

  const auto power = [&](double w) {
    double c = 0.0, s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      c += resid(i) * std::cos(w * t[static_cast<std::size_t>(i)]);
      s += resid(i) * std::sin(w * t[static_cast<std::size_t>(i)]);
    }
    return c * c + s * s;
  };
  const double dw = pi / (4.0 * span);
  double best_w = w_lo, best_p = -1.0;
  for (double w = w_lo; w <= w_hi; w += dw) {
    const double p = power(w);
    if (p > best_p) {
      best_p = p;
      best_w = w;
    }
  }
  // Golden-section refinement inside the winning bin.
  double a = std::max(w_lo, best_w - dw), b = std::min(w_hi, best_w + dw);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (power(c) > power(d)) b = d; else a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace qmpemba
