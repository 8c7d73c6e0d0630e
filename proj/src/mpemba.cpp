#include "qmpemba/mpemba.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmpemba/cache.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/parallel.hpp"

namespace qmpemba {

Operator initial_state(const ChainParams& p) {
  validate(p);
  const long dim = p.hilbert_dim();
  Operator rho = Operator::Zero(dim, dim);
  rho(dim - 1, dim - 1) = 1.0;  // every site in index 1 = down
  return rho;
}

double chi_overlap(const Operator& l2, const ChainParams& p, double theta, double phi) {
  const CVector psi = rotated_all_down(p.n_spins, theta, phi);
  if (l2.rows() != psi.size() || l2.cols() != psi.size())
    throw std::invalid_argument("chi_overlap: left mode dimension mismatch");
  return std::abs(psi.dot(l2 * psi));
}

namespace {

// L_ab = sum over basis states with a and b up-spins of l_ij. The rotated
// all-down state has amplitude s^a c^(N-a) e^{i phi (2a - N)/2} on every state
// with a up-spins, so chi only depends on this (N+1) x (N+1) reduction.
Operator excitation_blocks(const Operator& l2, int n_spins) {
  const long dim = l2.rows();
  Operator out = Operator::Zero(n_spins + 1, n_spins + 1);
  std::vector<int> ups(static_cast<std::size_t>(dim));
  for (long s = 0; s < dim; ++s) ups[s] = n_spins - __builtin_popcountl(static_cast<unsigned long>(s));
  for (long j = 0; j < dim; ++j)
    for (long i = 0; i < dim; ++i) out(ups[i], ups[j]) += l2(i, j);
  return out;
}

std::vector<double> midpoints(int n, double length) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double h = length / n;
  for (int i = 0; i < n; ++i) out[i] = (i + 0.5) * h;
  return out;
}

}  // namespace

OverlapMap scan_angles(const Operator& l2, const ChainParams& p, int n_theta, int n_phi) {
  validate(p);
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("scan_angles: grid sizes must be >= 2");
  if (l2.rows() != p.hilbert_dim()) throw std::invalid_argument("scan_angles: dimension mismatch");
  const int n = p.n_spins;
  const Operator blocks = excitation_blocks(l2, n);

  OverlapMap map;
  map.grid_theta = midpoints(n_theta, std::numbers::pi);
  map.grid_phi = midpoints(n_phi, 2.0 * std::numbers::pi);
  map.epsilon = p.epsilon;
  map.chi.resize(static_cast<std::size_t>(n_theta) * n_phi);

  // e^{i phi m} for m = 0..N, per phi.
  std::vector<CVector> phases(static_cast<std::size_t>(n_phi), CVector(n + 1));
  for (int ip = 0; ip < n_phi; ++ip)
    for (int m = 0; m <= n; ++m) phases[ip](m) = std::exp(kI * (map.grid_phi[ip] * m));

  std::vector<double> spow(static_cast<std::size_t>(2 * n + 1));
  std::vector<double> cpow(static_cast<std::size_t>(2 * n + 1));
  CVector g_pos(n + 1), g_neg(n + 1);
  for (int it = 0; it < n_theta; ++it) {
    const double s = std::sin(map.grid_theta[it] / 2.0);
    const double c = std::cos(map.grid_theta[it] / 2.0);
    spow[0] = cpow[0] = 1.0;
    for (int k = 1; k <= 2 * n; ++k) {
      spow[k] = spow[k - 1] * s;
      cpow[k] = cpow[k - 1] * c;
    }
    // g_m = sum_{b - a = m} L_ab s^{a+b} c^{2N-a-b}, split into m >= 0 and m < 0.
    g_pos.setZero();
    g_neg.setZero();
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) {
        const Complex term = blocks(a, b) * (spow[a + b] * cpow[2 * n - a - b]);
        if (b >= a)
          g_pos(b - a) += term;
        else
          g_neg(a - b) += term;
      }
    for (int ip = 0; ip < n_phi; ++ip) {
      const CVector& e = phases[ip];
      Complex acc = g_pos(0);
      for (int m = 1; m <= n; ++m) acc += g_pos(m) * e(m) + g_neg(m) * std::conj(e(m));
      map.chi[static_cast<std::size_t>(it) * n_phi + ip] = std::abs(acc);
    }
  }
  return with_threshold(std::move(map), p.epsilon);
}

OverlapMap scan_angles(const SpectralData& sd, const GapReport& gap, const ChainParams& p,
                       int n_theta, int n_phi) {
  return scan_angles(sd.left_mode(gap.index2), p, n_theta, n_phi);
}

OverlapMap with_threshold(OverlapMap map, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("with_threshold: epsilon must be > 0");
  map.epsilon = epsilon;
  map.mask.resize(map.chi.size());
  for (std::size_t k = 0; k < map.chi.size(); ++k) map.mask[k] = map.chi[k] <= epsilon ? 1 : 0;
  map.area = area(map);
  return map;
}

double area_from_rows(const std::vector<double>& theta, const std::vector<std::size_t>& row_counts,
                      std::size_t n_phi) {
  if (theta.size() != row_counts.size() || theta.empty() || n_phi == 0)
    throw std::invalid_argument("area_from_rows: inconsistent grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    acc += std::sin(theta[i]) * static_cast<double>(row_counts[i]);
  // dtheta dphi / (4 pi) = (pi / n_theta)(2 pi / n_phi) / (4 pi)
  const double a = acc * std::numbers::pi /
                   (2.0 * static_cast<double>(theta.size()) * static_cast<double>(n_phi));
  return std::clamp(a, 0.0, 1.0);
}

double area(const OverlapMap& map) {
  std::vector<std::size_t> rows(map.n_theta(), 0);
  for (std::size_t it = 0; it < map.n_theta(); ++it)
    for (std::size_t ip = 0; ip < map.n_phi(); ++ip) rows[it] += map.masked(it, ip) ? 1 : 0;
  return area_from_rows(map.grid_theta, rows, map.n_phi());
}

// ---------------------------------------------------------------------------

namespace {

HermitizedMode hermitize_impl(const Operator& l2) {
  const double scale = l2.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw MpembaError("left mode not phase-hermitizable (zero matrix)");
  // Minimizing ||e^{i psi} l - e^{-i psi} l^dag|| gives psi = -arg(tr(l l)) / 2.
  const Complex t = (l2 * l2).trace();
  Complex phase = std::exp(kI * (-std::arg(t) / 2.0));
  Operator m = phase * l2;
  const double defect = hermiticity_defect(m) / scale;
  if (defect > 1e-6) {
    std::ostringstream os;
    os << "left mode not phase-hermitizable (relative defect " << defect << ")";
    throw MpembaError(os.str());
  }
  Operator h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (std::abs(ev(0)) > std::abs(ev(ev.size() - 1))) {
    h = -h;
    phase = -phase;
  }
  HermitizedMode out;
  out.mode = std::move(h);
  out.phase = phase;
  out.defect_before = defect;
  return out;
}

}  // namespace

HermitizedMode hermitize_left_mode(const Operator& l2) { return hermitize_impl(l2); }

HermitizedMode hermitize_left_mode(const Operator& l2, const Operator& r2) {
  HermitizedMode out = hermitize_impl(l2);
  Operator r = r2 / out.phase;
  const Complex pairing = (out.mode * r).trace();
  out.right = r / pairing;
  return out;
}

Operator plane_rotation(const CVector& from, const CVector& to) {
  const long dim = from.size();
  Operator r = Operator::Identity(dim, dim);
  const Complex c = from.dot(to);  // <from|to>
  CVector u = to - c * from;
  const double s = u.norm();
  if (s < 1e-14) return r;
  u /= s;
  r += (c - 1.0) * from * from.adjoint();
  r += s * u * from.adjoint();
  r -= s * from * u.adjoint();
  r += (std::conj(c) - 1.0) * u * u.adjoint();
  return r;
}

Operator mixing_unitary(const CVector& phi1, const CVector& phi2, double s) {
  const long dim = phi1.size();
  const Operator x = phi1 * phi2.adjoint() + phi2 * phi1.adjoint();
  const Operator proj = phi1 * phi1.adjoint() + phi2 * phi2.adjoint();
  return Operator::Identity(dim, dim) + (std::cos(s) - 1.0) * proj - kI * std::sin(s) * x;
}

IdealUnitaryResult ideal_unitary_for_mode(const Operator& l2_hermitian, const CVector& psi0) {
  constexpr double zero_tol = 1e-10;
  Eigen::SelfAdjointEigenSolver<Operator> es(l2_hermitian);
  const Eigen::VectorXd& alpha = es.eigenvalues();
  const Operator& vecs = es.eigenvectors();

  IdealUnitaryResult res;
  res.l2 = l2_hermitian;
  Eigen::Index zero = -1;
  Eigen::Index neg = -1;
  Eigen::Index pos = -1;
  for (Eigen::Index m = 0; m < alpha.size(); ++m) {
    if (std::abs(alpha(m)) < zero_tol) {
      if (zero < 0 || std::abs(alpha(m)) < std::abs(alpha(zero))) zero = m;
    } else if (alpha(m) < 0.0) {
      neg = m;  // ascending order: last negative has the smallest magnitude
    } else if (pos < 0) {
      pos = m;
    }
  }

  if (zero >= 0) {
    res.used_zero_eigenvalue = true;
    res.alpha1 = res.alpha2 = alpha(zero);
    res.phi1 = res.phi2 = vecs.col(zero);
    res.unitary = plane_rotation(psi0, res.phi1);
  } else {
    if (neg < 0 || pos < 0)
      throw MpembaError("tracelessness violated: left mode eigenvalues all have the same sign");
    res.alpha1 = alpha(neg);
    res.alpha2 = alpha(pos);
    res.phi1 = vecs.col(neg);
    res.phi2 = vecs.col(pos);
    res.s = std::atan(std::sqrt(-res.alpha1 / res.alpha2));
    res.unitary = mixing_unitary(res.phi1, res.phi2, res.s) * plane_rotation(psi0, res.phi1);
  }
  const CVector psi = res.unitary * psi0;
  res.residual_overlap = std::abs(psi.dot(l2_hermitian * psi));
  if (!(res.residual_overlap < 1e-10)) {
    std::ostringstream os;
    os << "ideal unitary residual overlap " << res.residual_overlap << " exceeds 1e-10";
    throw MpembaError(os.str());
  }
  return res;
}

IdealUnitaryResult ideal_unitary(const SpectralData& sd, const GapReport& gap,
                                 const ChainParams& p) {
  if (gap.gap_is_complex)
    throw MpembaError("conjugate-pair gap: ideal construction not applicable");
  if (gap.multiplicity > 1 || gap.degenerate_gap)
    throw MpembaError("degenerate gap: ideal construction requires a non-degenerate lambda2");
  const HermitizedMode h = hermitize_left_mode(sd.left_mode(gap.index2));
  CVector psi0 = CVector::Zero(p.hilbert_dim());
  psi0(p.hilbert_dim() - 1) = 1.0;
  return ideal_unitary_for_mode(h.mode, psi0);
}

std::vector<InterpolationPoint> interpolation_check(const IdealUnitaryResult& res,
                                                    const CVector& psi0, int n_points) {
  if (n_points < 2) throw std::invalid_argument("interpolation_check: n_points must be >= 2");
  const Operator r = plane_rotation(psi0, res.phi1);
  const double half_pi = 0.5 * std::acos(-1.0);
  std::vector<InterpolationPoint> out;
  for (int k = 0; k < n_points; ++k) {
    InterpolationPoint pt;
    pt.s = half_pi * k / (n_points - 1);
    const CVector psi = mixing_unitary(res.phi1, res.phi2, pt.s) * (r * psi0);
    pt.overlap = psi.dot(res.l2 * psi).real();
    const double c = std::cos(pt.s);
    const double sn = std::sin(pt.s);
    pt.predicted = res.alpha1 * c * c + res.alpha2 * sn * sn;
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> Axis::values() const {
  if (steps < 1) throw std::invalid_argument("axis steps must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    out[i] = steps == 1 ? min : min + (max - min) * static_cast<double>(i) / (steps - 1);
  return out;
}

const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ok:
      return "ok";
    case CellStatus::pairing_failure:
      return "pairing_failure";
    case CellStatus::degenerate_stationary:
      return "degenerate_stationary";
    case CellStatus::no_gap:
      return "no_gap";
    case CellStatus::error:
      return "error";
  }
  return "error";
}

CellSpectrum compute_cell_spectrum(const ChainParams& p) {
  CellSpectrum out;
  SpectralData sd;
  try {
    sd = eigendecompose(build_generator(p));
  } catch (const SpectralError& e) {
    out.status = CellStatus::pairing_failure;
    out.message = e.what();
    return out;
  } catch (const std::exception& e) {
    out.status = CellStatus::error;
    out.message = e.what();
    return out;
  }
  if (sd.zero_modes != 1) {
    out.status = CellStatus::degenerate_stationary;
    out.message = std::to_string(sd.zero_modes) + " zero modes";
    return out;
  }
  try {
    classify_sector(sd, p);
    out.gap = gap_report(sd, true);
    if (out.gap.multiplicity > 1)
      throw SpectralError("degenerate slowest mode (multiplicity " +
                          std::to_string(out.gap.multiplicity) + ")");
  } catch (const std::exception& e) {
    out.status = CellStatus::no_gap;
    out.message = e.what();
    return out;
  }
  out.l2 = sd.left_mode(out.gap.index2);
  return out;
}

PlaneSweep plane_sweep(const ChainParams& base, const std::vector<double>& omega_axis,
                       const std::vector<double>& v_axis, const SweepOptions& opt) {
  validate(base);
  if (omega_axis.empty() || v_axis.empty())
    throw std::invalid_argument("plane_sweep: axes must be nonempty");
  PlaneSweep sweep;
  sweep.omega_axis = omega_axis;
  sweep.v_axis = v_axis;
  sweep.alpha = base.alpha;
  const std::size_t n_cells = omega_axis.size() * v_axis.size();
  sweep.cells.resize(n_cells);
  std::vector<unsigned char> hit(n_cells, 0);
  std::vector<unsigned char> decomposed(n_cells, 0);

  parallel_for(n_cells, opt.workers, [&](std::size_t idx) {
    ChainParams p = base;
    p.omega = omega_axis[idx / v_axis.size()];
    p.v = v_axis[idx % v_axis.size()];
    CellResult& cell = sweep.cells[idx];
    cell.alpha = p.alpha;
    cell.omega = p.omega;
    cell.v = p.v;

    std::optional<CellSpectrum> spec;
    std::optional<CacheKey> key;
    if (opt.cache) {
      key = spectral_cache_key(p);
      spec = opt.cache->lookup(*key);
      if (spec) hit[idx] = 1;
    }
    if (!spec) {
      spec = compute_cell_spectrum(p);
      decomposed[idx] = 1;
      if (opt.cache && spec->status == CellStatus::ok) opt.cache->store(*key, *spec);
    }
    cell.from_cache = hit[idx] != 0;
    cell.status = spec->status;
    cell.message = spec->message;
    if (spec->status != CellStatus::ok) return;
    cell.gap = spec->gap;
    cell.area = scan_angles(spec->l2, p, opt.n_theta, opt.n_phi).area;
  });

  sweep.stats.cells = n_cells;
  for (std::size_t i = 0; i < n_cells; ++i) {
    sweep.stats.cache_hits += hit[i];
    sweep.stats.decompositions += decomposed[i];
    if (sweep.cells[i].status != CellStatus::ok) ++sweep.stats.failures;
  }
  return sweep;
}

}  // namespace qmpemba
