// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Every tolerance and grid size used below is fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "qmpemba/commands.hpp"
#include "qmpemba/dynamics.hpp"
#include "qmpemba/io.hpp"
#include "qmpemba/mpemba.hpp"
#include "qmpemba/random.hpp"

using namespace qmpemba;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr double kSpectrumTol = 1e-9;
constexpr double kAreaTol = 1e-3;
constexpr double kSingleSpinSeconds = 1.0;
// Criterion 2
constexpr int kReconstructStates = 50;
constexpr double kReconstructTol = 1e-8;
constexpr double kBiorthTol = 1e-8;
constexpr double kCompletenessSeconds = 10.0;
// Criterion 3
constexpr int kPropagatorStates = 10;
constexpr int kPropagatorTimes = 20;
constexpr double kPropagatorTmax = 10.0;
constexpr double kPropagatorTol = 1e-7;
constexpr double kPropagatorSeconds = 30.0;
// Criterion 4
constexpr int kIdealMinPoints = 3;
constexpr int kIdealMaxPoints = 6;
constexpr double kIdealResidualTol = 1e-10;
constexpr double kInterpolationTol = 1e-9;
constexpr int kInterpolationPoints = 10;
// Criterion 5
constexpr double kMinOverlap = 0.1;
constexpr double kRateTol = 0.05;
constexpr double kEndToEndSeconds = 120.0;
// Criteria 6-8: N = 5, alpha = 0 plane on the default ranges, coarsened for one core.
constexpr int kPlaneSteps = 12;
constexpr double kRibbonArea = 0.05;       // corner cell at smallest (Omega, V)
constexpr double kExtendedArea = 0.2;      // cell at smallest Omega, largest V
constexpr double kAbruptJump = 0.1;        // one-step rise of A along V
constexpr int kMinTransitionRows = 4;
constexpr double kMinRatioBound = 0.4;
constexpr double kNearOneRatio = 0.9;
// Criterion 9
constexpr int kDeterminismWorkers = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string num(double x, const char* f = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ChainParams chain(int n, double omega, double v, double alpha = 0.0) {
  ChainParams p;
  p.n_spins = n;
  p.omega = omega;
  p.v = v;
  p.alpha = alpha;
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qmpemba_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Outcome single_spin_oracle() {
  const auto t0 = Clock::now();
  const ChainParams p = chain(1, 0.0, 0.0);
  const SpectralData sd = eigendecompose(build_generator(p));
  const std::vector<Complex> expected{0.0, -0.5, -0.5, -1.0};
  double spec_err = 0.0;
  for (std::size_t k = 0; k < 4; ++k) spec_err = std::max(spec_err, std::abs(sd.eigenvalues[k] - expected[k]));

  Operator down = Operator::Zero(2, 2);
  down(1, 1) = 1.0;
  const double ss_err = (sd.stationary - down).norm();

  // chi for l = |up><up| is the excited-state population after the rotation.
  Operator up = Operator::Zero(2, 2);
  up(0, 0) = 1.0;
  const OverlapMap map = scan_angles(up, p, 180, 360);
  double chi_err = 0.0;
  for (std::size_t it = 0; it < map.n_theta(); ++it)
    for (std::size_t ip = 0; ip < map.n_phi(); ++ip) {
      const double s = std::sin(0.5 * map.grid_theta[it]);
      chi_err = std::max(chi_err, std::abs(map.chi_at(it, ip) - s * s));
    }
  Rng rng(5);
  std::uniform_real_distribution<double> th(0.0, std::acos(-1.0)), ph(0.0, 2.0 * std::acos(-1.0));
  for (int i = 0; i < 100; ++i) {
    const double a = th(rng), b = ph(rng);
    const double s = std::sin(0.5 * a);
    chi_err = std::max(chi_err, std::abs(chi_overlap(up, p, a, b) - s * s));
  }
  const double area_err = std::abs(map.area - 0.01);
  const double secs = seconds_since(t0);

  Outcome o;
  o.passed = spec_err < kSpectrumTol && ss_err < kSpectrumTol && chi_err < kSpectrumTol &&
             area_err < kAreaTol && secs < kSingleSpinSeconds;
  o.detail = "spectrum err " + num(spec_err) + ", rho_SS err " + num(ss_err) + ", chi err " +
             num(chi_err) + " (< " + num(kSpectrumTol) + "); A = " + num(map.area, "%.5f") +
             " (|A - 0.01| < " + num(kAreaTol) + "); " + num(secs, "%.2f") + " s < " +
             num(kSingleSpinSeconds) + " s";
  return o;
}

Outcome biorthogonal_completeness() {
  const auto t0 = Clock::now();
  const SpectralData sd = eigendecompose(build_generator(chain(3, 1.3, 0.8)));
  const Eigen::Index m = static_cast<Eigen::Index>(sd.size());
  const Operator gram = sd.left.transpose() * sd.right;
  const double biorth = (gram - Operator::Identity(m, m)).cwiseAbs().maxCoeff();

  Rng rng(17);
  double recon = 0.0;
  for (int s = 0; s < kReconstructStates; ++s) {
    const Operator rho = random_density(8, rng);
    const CVector v = Eigen::Map<const CVector>(rho.data(), rho.size());
    const CVector back = sd.right * (sd.left.transpose() * v);
    recon = std::max(recon, (back - v).norm());
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.passed = m == 64 && biorth < kBiorthTol && recon < kReconstructTol && secs < kCompletenessSeconds;
  o.detail = std::to_string(m) + " modes; max |tr(l_j r_k) - delta_jk| = " + num(biorth) + " < " +
             num(kBiorthTol) + " over " + std::to_string(m * m) + " pairs; reconstruction of " +
             std::to_string(kReconstructStates) + " states " + num(recon) + " < " +
             num(kReconstructTol) + "; " + num(secs, "%.2f") + " s < " + num(kCompletenessSeconds) + " s";
  return o;
}

Outcome propagator_cross_validation() {
  const auto t0 = Clock::now();
  const ChainParams p = chain(3, 1.4, 0.9);
  const Generator g = build_generator(p);
  const SpectralData sd = eigendecompose(g);
  Rng rng(23);
  std::uniform_real_distribution<double> unif(0.0, kPropagatorTmax);
  double worst = 0.0;
  for (int s = 0; s < kPropagatorStates; ++s) {
    const CVector psi = random_pure(8, rng);
    const Operator rho0 = psi * psi.adjoint();
    std::vector<double> times(kPropagatorTimes);
    for (auto& t : times) t = unif(rng);
    std::sort(times.begin(), times.end());
    EvolveOptions opt;
    opt.retain_states = true;
    const Trajectory traj = evolve(g, rho0, times, opt);
    for (std::size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, trace_distance(traj.states[i], reconstruct_state(sd, rho0, times[i]).state));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.passed = worst < kPropagatorTol && secs < kPropagatorSeconds;
  o.detail = std::to_string(kPropagatorStates) + " pure states x " + std::to_string(kPropagatorTimes) +
             " times in [0, " + num(kPropagatorTmax) + "]: max trace distance " + num(worst) + " < " +
             num(kPropagatorTol) + "; " + num(secs, "%.2f") + " s < " + num(kPropagatorSeconds) + " s";
  return o;
}

Outcome ideal_unitary_points() {
  // Coarse N=3 plane; real, non-degenerate gaps are taken in scan order.
  const std::vector<double> omegas{0.5, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> vs{0.5, 1.0, 2.0, 3.0, 5.0};
  int tested = 0, passed = 0;
  double worst_res = 0.0, worst_interp = 0.0;
  std::string points;
  for (double om : omegas)
    for (double v : vs) {
      if (tested >= kIdealMaxPoints) break;
      const ChainParams p = chain(3, om, v);
      SpectralData sd = eigendecompose(build_generator(p));
      classify_sector(sd, p);
      const GapReport gap = gap_report(sd, true);
      if (gap.gap_is_complex || gap.degenerate_gap || gap.multiplicity != 1) continue;
      ++tested;
      const IdealUnitaryResult res = ideal_unitary(sd, gap, p);
      CVector psi0 = CVector::Zero(8);
      psi0(7) = 1.0;
      double interp = 0.0;
      for (const auto& pt : interpolation_check(res, psi0, kInterpolationPoints))
        interp = std::max(interp, std::abs(pt.overlap - pt.predicted));
      worst_res = std::max(worst_res, res.residual_overlap);
      worst_interp = std::max(worst_interp, interp);
      if (res.residual_overlap < kIdealResidualTol && interp < kInterpolationTol) ++passed;
      points += (points.empty() ? "" : " ") + std::string("(") + num(om, "%g") + "," + num(v, "%g") + ")";
    }
  Outcome o;
  o.passed = passed >= kIdealMinPoints && passed == tested;
  o.detail = std::to_string(passed) + "/" + std::to_string(tested) + " real-gap points at N=3 " +
             points + " (need >= " + std::to_string(kIdealMinPoints) + "); max residual " +
             num(worst_res) + " < " + num(kIdealResidualTol) + ", max interpolation error " +
             num(worst_interp) + " < " + num(kInterpolationTol) + " on " +
             std::to_string(kInterpolationPoints) + " s values";
  return o;
}

Outcome end_to_end_speedup() {
  const auto t0 = Clock::now();
  const ChainParams p = chain(4, 3.0, 2.0);
  const Generator g = build_generator(p);
  SpectralData sd = eigendecompose(g);
  classify_sector(sd, p);
  const GapReport gap = gap_report(sd, true);
  const Operator rho0 = initial_state(p);
  const double overlap = std::abs(sd.coefficient(gap.index2, rho0));
  Outcome o;
  if (gap.gap_is_complex || gap.multiplicity != 1) {
    o.detail = "N=4 (3,2) does not have a real non-degenerate gap";
    return o;
  }
  EvolveOptions opt;
  opt.stationary = sd.stationary;
  const auto times = log_times(20.0 * gap.tau2, 400);
  const double rate2 = fit_decay_rate(evolve(g, rho0, times, opt));
  const IdealUnitaryResult ideal = ideal_unitary(sd, gap, p);
  const Operator rotated = ideal.unitary * rho0 * ideal.unitary.adjoint();
  const double rate3 = fit_decay_rate(evolve(g, rotated, times, opt));
  const double e2 = std::abs(rate2 / gap.lambda2.real() - 1.0);
  const double e3 = std::abs(rate3 / gap.lambda3.real() - 1.0);
  const double secs = seconds_since(t0);
  o.passed = overlap > kMinOverlap && e2 < kRateTol && e3 < kRateTol && secs < kEndToEndSeconds;
  o.detail = "N=4 Omega=3 V=2: |tr(l2 rho0)| = " + num(overlap) + " > " + num(kMinOverlap) +
             "; unrotated rate " + num(rate2, "%.5f") + " vs Re l2 " + num(gap.lambda2.real(), "%.5f") +
             " (rel " + num(e2) + "), ideal rate " + num(rate3, "%.5f") + " vs Re l3 " +
             num(gap.lambda3.real(), "%.5f") + " (rel " + num(e3) + ") < " + num(kRateTol) + "; " +
             num(secs, "%.1f") + " s < " + num(kEndToEndSeconds) + " s";
  return o;
}

struct Plane {
  PlaneSweep sweep;
  double seconds = 0.0;
  bool all_ok = false;
  std::size_t n_omega() const { return sweep.omega_axis.size(); }
  std::size_t n_v() const { return sweep.v_axis.size(); }
  bool complex_at(std::size_t io, std::size_t iv) const { return sweep.at(io, iv).gap.gap_is_complex; }
};

const Plane& n5_plane() {
  static const Plane plane = [] {
    Plane pl;
    const auto t0 = Clock::now();
    ChainParams base = chain(5, 0.0, 0.0);
    SweepOptions opt;
    opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const Axis om{0.2, 4.0, kPlaneSteps}, v{0.2, 8.0, kPlaneSteps};
    pl.sweep = plane_sweep(base, om.values(), v.values(), opt);
    pl.seconds = seconds_since(t0);
    pl.all_ok = pl.sweep.stats.failures == 0;
    return pl;
  }();
  return plane;
}

std::string grid_note(const Plane& pl) {
  return std::to_string(pl.n_omega()) + "x" + std::to_string(pl.n_v()) + " N=5 alpha=0 sweep, " +
         std::to_string(pl.sweep.stats.failures) + " failed cells, " + num(pl.seconds, "%.0f") + " s";
}

// Number of 4-connected components among cells where pick(io, iv) holds.
int components(const Plane& pl, const std::function<bool(std::size_t, std::size_t)>& pick) {
  const std::size_t no = pl.n_omega(), nv = pl.n_v();
  std::vector<int> label(no * nv, -1);
  int count = 0;
  for (std::size_t start = 0; start < no * nv; ++start) {
    if (label[start] >= 0 || !pick(start / nv, start % nv)) continue;
    std::vector<std::size_t> stack{start};
    label[start] = count;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const std::size_t io = c / nv, iv = c % nv;
      const std::size_t nb[4][2] = {{io - 1, iv}, {io + 1, iv}, {io, iv - 1}, {io, iv + 1}};
      for (const auto& n : nb) {
        if (n[0] >= no || n[1] >= nv) continue;  // wraps for io - 1 at 0
        const std::size_t k = n[0] * nv + n[1];
        if (label[k] < 0 && pick(n[0], n[1])) {
          label[k] = count;
          stack.push_back(k);
        }
      }
    }
    ++count;
  }
  return count;
}

bool on_boundary(const Plane& pl, std::size_t io, std::size_t iv) {
  const bool c = pl.complex_at(io, iv);
  return (io > 0 && pl.complex_at(io - 1, iv) != c) || (io + 1 < pl.n_omega() && pl.complex_at(io + 1, iv) != c) ||
         (iv > 0 && pl.complex_at(io, iv - 1) != c) || (iv + 1 < pl.n_v() && pl.complex_at(io, iv + 1) != c);
}

Outcome gap_phase_diagram() {
  const Plane& pl = n5_plane();
  std::size_t n_complex = 0;
  for (const auto& c : pl.sweep.cells) n_complex += c.gap.gap_is_complex ? 1 : 0;
  const std::size_t n_real = pl.sweep.cells.size() - n_complex;
  const int cc = components(pl, [&](std::size_t io, std::size_t iv) { return pl.complex_at(io, iv); });
  const int rc = components(pl, [&](std::size_t io, std::size_t iv) { return !pl.complex_at(io, iv); });
  Outcome o;
  o.passed = pl.all_ok && n_complex > 0 && n_real > 0 && cc == 1 && rc == 1;
  o.detail = std::to_string(n_complex) + " complex-gap and " + std::to_string(n_real) +
             " real-gap cells; complex region in " + std::to_string(cc) + " component(s), real region in " +
             std::to_string(rc) + " (need 1 each, so the boundary is a single curve); " + grid_note(pl);
  return o;
}

Outcome area_map_features() {
  const Plane& pl = n5_plane();
  double min_area = 1.0;
  for (const auto& c : pl.sweep.cells) min_area = std::min(min_area, c.area);
  const double corner = pl.sweep.at(0, 0).area;
  const double extended = pl.sweep.at(0, pl.n_v() - 1).area;

  // Critical V per Omega row: midpoint of the largest one-step rise of A, if abrupt.
  std::vector<double> vc;
  std::string rows;
  for (std::size_t io = 0; io < pl.n_omega(); ++io) {
    double best = 0.0;
    std::size_t at = 0;
    for (std::size_t iv = 0; iv + 1 < pl.n_v(); ++iv) {
      const double jump = pl.sweep.at(io, iv + 1).area - pl.sweep.at(io, iv).area;
      if (jump > best) {
        best = jump;
        at = iv;
      }
    }
    if (best < kAbruptJump) continue;
    vc.push_back(0.5 * (pl.sweep.v_axis[at] + pl.sweep.v_axis[at + 1]));
    rows += (rows.empty() ? "" : " ") + num(pl.sweep.omega_axis[io], "%.2f") + ":" + num(vc.back(), "%.2f");
  }
  bool monotone = vc.size() >= static_cast<std::size_t>(kMinTransitionRows) && vc.back() > vc.front();
  for (std::size_t i = 1; i < vc.size(); ++i) monotone = monotone && vc[i] >= vc[i - 1];

  Outcome o;
  o.passed = pl.all_ok && min_area > 0.0 && corner < kRibbonArea && extended > kExtendedArea && monotone;
  o.detail = "min A " + num(min_area) + " > 0; corner A " + num(corner) + " < " + num(kRibbonArea) +
             " (ribbon); small-Omega large-V A " + num(extended) + " > " + num(kExtendedArea) +
             " (extended); critical V by Omega (jump >= " + num(kAbruptJump) + ") " + rows +
             (monotone ? " non-decreasing" : " NOT non-decreasing or too few rows") + "; " + grid_note(pl);
  return o;
}

Outcome timescale_ratio_features() {
  const Plane& pl = n5_plane();
  double lo = 2.0, hi = -1.0;
  std::size_t hi_o = 0, hi_v = 0;
  bool in_range = true;
  for (std::size_t io = 0; io < pl.n_omega(); ++io)
    for (std::size_t iv = 0; iv < pl.n_v(); ++iv) {
      const double r = pl.sweep.at(io, iv).gap.ratio;
      in_range = in_range && r > 0.0 && r <= 1.0;
      lo = std::min(lo, r);
      if (r > hi) {
        hi = r;
        hi_o = io;
        hi_v = iv;
      }
    }
  const bool at_edge = on_boundary(pl, hi_o, hi_v);
  Outcome o;
  o.passed = pl.all_ok && in_range && lo <= kMinRatioBound && hi >= kNearOneRatio && at_edge;
  o.detail = "min tau3/tau2 " + num(lo) + " <= " + num(kMinRatioBound) + "; max " + num(hi) + " >= " +
             num(kNearOneRatio) + " at Omega=" + num(pl.sweep.omega_axis[hi_o], "%.2f") + " V=" +
             num(pl.sweep.v_axis[hi_v], "%.2f") + (at_edge ? ", on" : ", NOT on") +
             " the real/complex transition; all ratios in (0, 1]: " + (in_range ? "yes" : "no");
  return o;
}

Outcome determinism() {
  const fs::path root = scratch("determinism");
  const KeyValues common{{"model.n_spins", "3"},   {"plane.omega_min", "0.3"},
                         {"plane.omega_max", "3"}, {"plane.omega_steps", "4"},
                         {"plane.v_min", "0.3"},   {"plane.v_max", "5"},
                         {"plane.v_steps", "4"},   {"plane.alpha_list", "0, 2"},
                         {"scan.n_theta", "45"},   {"scan.n_phi", "90"},
                         {"cache.directory", (root / "cache").string()}};
  auto run = [&](const std::string& dir, const KeyValues& extra) {
    KeyValues kv = common;
    kv.emplace_back("output.directory", (root / dir).string());
    kv.insert(kv.end(), extra.begin(), extra.end());
    return run_command("area-map", build_config(kv, {}, {}));
  };
  const std::string w = std::to_string(kDeterminismWorkers);
  const CommandOutput cold = run("cold", {{"workers", "1"}});
  const CommandOutput warm = run("warm", {{"workers", w}});
  const CommandOutput bare = run("bare", {{"workers", w}, {"cache.enabled", "false"}});
  Outcome o;
  if (cold.exit_code || warm.exit_code || bare.exit_code) {
    o.detail = "area-map failed: " + cold.error + warm.error + bare.error;
    return o;
  }
  const std::string ref = read_text(root / "cold" / "area_map.csv");
  const bool same_warm = read_text(root / "warm" / "area_map.csv") == ref;
  const bool same_bare = read_text(root / "bare" / "area_map.csv") == ref;
  o.passed = same_warm && same_bare;
  o.detail = "N=3, 32 cells: cold/1 worker [" + cold.report.back() + "] vs warm/" + w +
             " workers [" + warm.report.back() + "]: " + (same_warm ? "identical" : "DIFFERENT") +
             "; uncached/" + w + " workers: " + (same_bare ? "identical" : "DIFFERENT");
  return o;
}

void report(int id, const std::string& title, const std::function<Outcome()>& fn, int& failures) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.passed) ++failures;
  std::printf("%s %d %s: %s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  pin_blas_threads();
  int failures = 0;
  report(1, "single-spin analytic oracle", single_spin_oracle, failures);
  report(2, "biorthogonal completeness", biorthogonal_completeness, failures);
  report(3, "propagator cross-validation", propagator_cross_validation, failures);
  report(4, "ideal-unitary construction", ideal_unitary_points, failures);
  report(5, "end-to-end speedup", end_to_end_speedup, failures);
  report(6, "complex/real gap regions", gap_phase_diagram, failures);
  report(7, "acceleration area map", area_map_features, failures);
  report(8, "timescale ratio", timescale_ratio_features, failures);
  report(9, "determinism", determinism, failures);
  return failures == 0 ? 0 : 1;
}
