#include "qmpemba/commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "qmpemba/cache.hpp"
#include "qmpemba/dynamics.hpp"
#include "qmpemba/errors.hpp"
#include "qmpemba/io.hpp"
#include "qmpemba/verify.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace qmpemba {

namespace fs = std::filesystem;
using nlohmann::json;

void pin_blas_threads() {
  if (openblas_set_num_threads) openblas_set_num_threads(1);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json gap_json(const GapReport& g) {
  return {{"re_lambda2", g.lambda2.real()},
          {"im_lambda2", g.lambda2.imag()},
          {"re_lambda3", g.lambda3.real()},
          {"im_lambda3", g.lambda3.imag()},
          {"tau2", g.tau2},
          {"tau3", g.tau3},
          {"tau3_over_tau2", g.ratio},
          {"gap_is_complex", g.gap_is_complex},
          {"degenerate_gap", g.degenerate_gap},
          {"multiplicity", g.multiplicity},
          {"index2", g.index2 + 1},
          {"index3", g.index3 + 1},
          {"restricted_to_symmetric", g.restricted},
          {"unclassified_skipped", g.unclassified_skipped}};
}

struct Analysis {
  Generator generator;
  SpectralData sd;
  GapReport gap;  ///< restricted to the symmetric sector
};

// Decomposition and sector labels without the gap report.
Analysis analyze_modes(const ChainParams& p) {
  validate(p);
  Analysis a;
  a.generator = build_generator(p);
  a.sd = eigendecompose(a.generator);
  if (a.sd.zero_modes != 1) throw SpectralError("degenerate stationary manifold");
  classify_sector(a.sd, p);
  return a;
}

Analysis analyze(const ChainParams& p) {
  Analysis a = analyze_modes(p);
  a.gap = gap_report(a.sd, true);
  return a;
}

std::unique_ptr<SpectrumCache> open_cache(const RunConfig& cfg) {
  if (!cfg.cache.enabled) return nullptr;
  return std::make_unique<SpectrumCache>(cfg.cache.directory);
}

void prepare_output(const RunConfig& cfg, CommandOutput& out) {
  fs::create_directories(cfg.output.directory);
  const fs::path path = cfg.output.directory / "effective_config.json";
  write_json(path, to_json(cfg));
  out.files.push_back(path);
}

void emit_script(const RunConfig& cfg, CommandOutput& out, const std::string& name,
                 const std::string& body) {
  if (!cfg.output.emit_plot_scripts || cfg.output.format != OutputFormat::csv) return;
  const fs::path path = cfg.output.directory / name;
  write_text_atomic(path, "set datafile separator ','\n" + body);
  out.files.push_back(path);
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

CommandOutput cmd_spectrum(const RunConfig& cfg) {
  CommandOutput out;
  prepare_output(cfg, out);
  const Analysis a = analyze(cfg.model);
  const SpectralData& sd = a.sd;

  Table t;
  t.columns = {"index", "re_lambda", "im_lambda", "sector", "trace_residual", "biorth_residual"};
  for (std::size_t k = 0; k < sd.size(); ++k)
    t.rows.push_back({static_cast<std::int64_t>(k + 1), sd.eigenvalues[k].real(),
                      sd.eigenvalues[k].imag(), std::string(to_string(sd.sectors[k])),
                      sd.residuals[k].trace, sd.residuals[k].biorth});
  out.files.push_back(write_table(cfg.output.directory / "spectrum", t,
                                  cfg.output.format == OutputFormat::json));

  json g;
  g["symmetric_sector"] = gap_json(a.gap);
  try {
    g["all_sectors"] = gap_json(gap_report(sd, false));
  } catch (const SpectralError& e) {
    g["all_sectors"] = {{"error", e.what()}};
  }
  g["n_modes"] = sd.size();
  g["zero_modes"] = sd.zero_modes;
  g["biorthogonality_defect"] = biorthogonality_defect(sd);
  const fs::path gap_path = cfg.output.directory / "gap.json";
  write_json(gap_path, g);
  out.files.push_back(gap_path);

  emit_script(cfg, out, "spectrum.gp",
              "set xlabel 'Re lambda'\nset ylabel 'Im lambda'\n"
              "plot 'spectrum.csv' every ::1 using 2:3 with points pt 7 title 'spectrum'\n");

  out.report.push_back("modes " + std::to_string(sd.size()) + ", lambda2 = " +
                       fmt(a.gap.lambda2.real()) + (a.gap.lambda2.imag() < 0 ? " - " : " + ") +
                       fmt(std::abs(a.gap.lambda2.imag())) + "i, tau3/tau2 = " +
                       fmt(a.gap.ratio));
  return out;
}

CommandOutput cmd_scan_angles(const RunConfig& cfg) {
  CommandOutput out;
  prepare_output(cfg, out);
  validate(cfg.model);
  Operator mode;
  json mode_info;
  if (cfg.scan.mode_index == 0) {
    auto cache = open_cache(cfg);
    std::optional<CellSpectrum> spec;
    const CacheKey key = spectral_cache_key(cfg.model);
    if (cache) spec = cache->lookup(key);
    if (!spec) {
      spec = compute_cell_spectrum(cfg.model);
      if (spec->status != CellStatus::ok) throw SpectralError(spec->message);
      if (cache) cache->store(key, *spec);
    }
    mode = spec->l2;
    mode_info = gap_json(spec->gap);
  } else {
    const Analysis a = analyze_modes(cfg.model);
    const auto k = static_cast<std::size_t>(cfg.scan.mode_index - 1);
    if (k >= a.sd.size())
      throw ConfigError("scan.mode_index: " + std::to_string(cfg.scan.mode_index) +
                        " exceeds the number of modes (" + std::to_string(a.sd.size()) + ")");
    mode = a.sd.left_mode(k);
    mode_info = {{"index", cfg.scan.mode_index},
                 {"re_lambda", a.sd.eigenvalues[k].real()},
                 {"im_lambda", a.sd.eigenvalues[k].imag()},
                 {"sector", to_string(a.sd.sectors[k])}};
  }
  const OverlapMap map = scan_angles(mode, cfg.model, cfg.scan.n_theta, cfg.scan.n_phi);

  Table t;
  t.columns = {"theta", "phi", "chi", "accelerated"};
  t.rows.reserve(map.chi.size());
  for (std::size_t it = 0; it < map.n_theta(); ++it)
    for (std::size_t ip = 0; ip < map.n_phi(); ++ip)
      t.rows.push_back({map.grid_theta[it], map.grid_phi[ip], map.chi_at(it, ip),
                        static_cast<std::int64_t>(map.masked(it, ip) ? 1 : 0)});
  out.files.push_back(write_table(cfg.output.directory / "scan", t,
                                  cfg.output.format == OutputFormat::json));

  json meta;
  meta["epsilon"] = map.epsilon;
  meta["n_theta"] = map.n_theta();
  meta["n_phi"] = map.n_phi();
  meta["area"] = map.area;
  meta[cfg.scan.mode_index == 0 ? "gap" : "mode"] = mode_info;
  const fs::path meta_path = cfg.output.directory / "scan_meta.json";
  write_json(meta_path, meta);
  out.files.push_back(meta_path);

  std::ostringstream gp;
  gp << "set xlabel 'phi'\nset ylabel 'theta'\nset view map\n"
     << "splot 'scan.csv' every ::1 using 2:1:(log10($3)) with pm3d title 'log10 chi', \\\n"
     << "      'scan.csv' every ::1 using 2:1:($4 > 0 ? 0 : 1/0) with points pt 5 ps 0.3 "
        "title 'chi <= eps'\n";
  emit_script(cfg, out, "scan.gp", gp.str());

  out.report.push_back("area " + fmt(map.area) + " at epsilon " + fmt(map.epsilon));
  return out;
}

CommandOutput cmd_area_map(const RunConfig& cfg) {
  CommandOutput out;
  prepare_output(cfg, out);
  auto cache = open_cache(cfg);
  const std::vector<double> omegas = cfg.plane.omega.values();
  const std::vector<double> vs = cfg.plane.v.values();

  Table t;
  t.columns = {"alpha", "omega", "v", "re_lambda2", "im_lambda2", "gap_is_complex",
               "tau3_over_tau2", "area", "cell_status"};
  std::size_t n_cells = 0, n_ok = 0, hits = 0, decompositions = 0;
  for (double alpha : cfg.plane.alpha_list) {
    ChainParams base = cfg.model;
    base.alpha = alpha;
    SweepOptions opt;
    opt.n_theta = cfg.scan.n_theta;
    opt.n_phi = cfg.scan.n_phi;
    opt.workers = cfg.workers;
    opt.cache = cache.get();
    const PlaneSweep sweep = plane_sweep(base, omegas, vs, opt);
    for (const CellResult& c : sweep.cells) {
      const bool ok = c.status == CellStatus::ok;
      t.rows.push_back({c.alpha, c.omega, c.v, ok ? c.gap.lambda2.real() : kNaN,
                        ok ? c.gap.lambda2.imag() : kNaN,
                        static_cast<std::int64_t>(ok && c.gap.gap_is_complex ? 1 : 0),
                        ok ? c.gap.ratio : kNaN, ok ? c.area : kNaN,
                        std::string(to_string(c.status))});
      if (!ok)
        std::cerr << "cell alpha=" << fmt(c.alpha) << " omega=" << fmt(c.omega)
                  << " v=" << fmt(c.v) << ": " << to_string(c.status) << " (" << c.message
                  << ")\n";
    }
    n_cells += sweep.stats.cells;
    n_ok += sweep.stats.cells - sweep.stats.failures;
    hits += sweep.stats.cache_hits;
    decompositions += sweep.stats.decompositions;
  }
  out.files.push_back(write_table(cfg.output.directory / "area_map", t,
                                  cfg.output.format == OutputFormat::json));

  json meta;
  meta["cells"] = n_cells;
  meta["ok_cells"] = n_ok;
  meta["epsilon"] = cfg.model.epsilon;
  meta["n_theta"] = cfg.scan.n_theta;
  meta["n_phi"] = cfg.scan.n_phi;
  meta["omega_axis"] = omegas;
  meta["v_axis"] = vs;
  meta["alpha_list"] = cfg.plane.alpha_list;
  const fs::path meta_path = cfg.output.directory / "area_map_meta.json";
  write_json(meta_path, meta);
  out.files.push_back(meta_path);

  emit_script(cfg, out, "area_map.gp",
              "set xlabel 'V'\nset ylabel 'Omega'\nset view map\n"
              "set title 'relative area (first alpha)'\n"
              "splot 'area_map.csv' every ::1 using 3:($1 == " +
                  fmt(cfg.plane.alpha_list.front()) +
                  " ? $2 : 1/0):8 with points pt 5 palette title ''\n");

  out.report.push_back("cells " + std::to_string(n_cells) + ", ok " + std::to_string(n_ok) +
                       ", cache hits " + std::to_string(hits) + ", decompositions " +
                       std::to_string(decompositions));
  if (n_ok * 10 < n_cells * 9) {
    out.exit_code = kExitSpectral;
    out.error = "fewer than 90% of cells succeeded";
  }
  return out;
}

CommandOutput cmd_evolve(const RunConfig& cfg) {
  CommandOutput out;
  prepare_output(cfg, out);
  const Analysis a = analyze(cfg.model);
  const long d = cfg.model.hilbert_dim();

  CVector psi0 = CVector::Zero(d);
  psi0(d - 1) = 1.0;
  CVector psi = psi0;
  json fit;
  fit["mode"] = to_string(cfg.evolve.mode);
  switch (cfg.evolve.mode) {
    case EvolveMode::identity:
      break;
    case EvolveMode::rotated:
      psi = rotated_all_down(cfg.model.n_spins, cfg.evolve.theta, cfg.evolve.phi);
      fit["theta"] = cfg.evolve.theta;
      fit["phi"] = cfg.evolve.phi;
      break;
    case EvolveMode::ideal: {
      const IdealUnitaryResult res = ideal_unitary(a.sd, a.gap, cfg.model);
      psi = res.unitary * psi0;
      fit["ideal_residual_overlap"] = res.residual_overlap;
      break;
    }
  }
  const Operator rho0 = psi * psi.adjoint();

  const std::vector<double> times =
      log_times(cfg.evolve.t_max_over_tau2 * a.gap.tau2, cfg.evolve.n_samples);
  EvolveOptions opt;
  opt.stationary = a.sd.stationary;
  const Trajectory traj = evolve(a.generator, rho0, times, opt);

  Table t;
  t.columns = {"t", "trace_distance"};
  for (std::size_t i = 0; i < times.size(); ++i) t.rows.push_back({times[i], traj.distances[i]});
  out.files.push_back(write_table(cfg.output.directory / "evolve", t,
                                  cfg.output.format == OutputFormat::json));

  fit["re_lambda2"] = a.gap.lambda2.real();
  fit["im_lambda2"] = a.gap.lambda2.imag();
  fit["re_lambda3"] = a.gap.lambda3.real();
  fit["overlap_lambda2"] = std::abs(a.sd.coefficient(a.gap.index2, rho0));
  fit["window"] = {{"d_hi", cfg.evolve.window.d_hi}, {"d_lo", cfg.evolve.window.d_lo}};
  fit["method"] = to_string(traj.method);
  std::string error;
  try {
    const double rate = fit_decay_rate(traj, cfg.evolve.window);
    fit["fitted_rate"] = rate;
    fit["rate_over_re_lambda2"] = rate / a.gap.lambda2.real();
    fit["rate_over_re_lambda3"] = rate / a.gap.lambda3.real();
    out.report.push_back("fitted rate " + fmt(rate) + " (Re lambda2 " +
                         fmt(a.gap.lambda2.real()) + ", Re lambda3 " +
                         fmt(a.gap.lambda3.real()) + ")");
  } catch (const DynamicsError& e) {
    error = e.what();
    fit["fitted_rate"] = nullptr;
    fit["error"] = error;
  }
  const fs::path fit_path = cfg.output.directory / "fit.json";
  write_json(fit_path, fit);
  out.files.push_back(fit_path);

  emit_script(cfg, out, "evolve.gp",
              "set logscale y\nset xlabel 't'\nset ylabel 'trace distance'\n"
              "plot 'evolve.csv' every ::1 using 1:2 with lines title '" +
                  std::string(to_string(cfg.evolve.mode)) + "'\n");

  if (!error.empty()) throw DynamicsError(error);
  return out;
}

CommandOutput cmd_ideal_unitary(const RunConfig& cfg) {
  CommandOutput out;
  prepare_output(cfg, out);
  const Analysis a = analyze(cfg.model);
  const IdealUnitaryResult res = ideal_unitary(a.sd, a.gap, cfg.model);
  const long d = cfg.model.hilbert_dim();
  CVector psi0 = CVector::Zero(d);
  psi0(d - 1) = 1.0;

  json j;
  j["re_lambda2"] = a.gap.lambda2.real();
  j["s"] = res.s;
  j["alpha1"] = res.alpha1;
  j["alpha2"] = res.alpha2;
  j["used_zero_eigenvalue"] = res.used_zero_eigenvalue;
  j["residual_overlap"] = res.residual_overlap;
  json interp = json::array();
  double worst = 0.0;
  for (const auto& pt : interpolation_check(res, psi0, 10)) {
    interp.push_back({{"s", pt.s}, {"overlap", pt.overlap}, {"predicted", pt.predicted}});
    worst = std::max(worst, std::abs(pt.overlap - pt.predicted));
  }
  j["interpolation"] = interp;
  j["interpolation_max_error"] = worst;
  json re = json::array(), im = json::array();
  for (long r = 0; r < d; ++r) {
    json rr = json::array(), ri = json::array();
    for (long c = 0; c < d; ++c) {
      rr.push_back(res.unitary(r, c).real());
      ri.push_back(res.unitary(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  j["unitary_re"] = re;
  j["unitary_im"] = im;
  const fs::path path = cfg.output.directory / "ideal_unitary.json";
  write_json(path, j);
  out.files.push_back(path);
  out.report.push_back("s = " + fmt(res.s) + ", residual overlap " + fmt(res.residual_overlap));
  return out;
}

CommandOutput cmd_verify(const RunConfig& cfg) {
  if (cfg.model.n_spins > 3) throw ConfigError("model.n_spins: verify requires n_spins <= 3");
  CommandOutput out;
  prepare_output(cfg, out);
  const auto checks = run_invariant_suite(cfg.model);
  json arr = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    arr.push_back({{"name", c.name},
                   {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed},
                   {"skipped", c.skipped},
                   {"note", c.note}});
    std::string line = std::string(c.skipped ? "SKIP " : c.passed ? "PASS " : "FAIL ") + c.name;
    if (!c.skipped) line += " " + fmt(c.value) + " < " + fmt(c.tolerance);
    if (!c.note.empty()) line += " (" + c.note + ")";
    out.report.push_back(line);
  }
  const fs::path path = cfg.output.directory / "verify.json";
  write_json(path, {{"checks", arr}, {"passed", all}});
  out.files.push_back(path);
  if (!all) {
    out.exit_code = kExitVerification;
    out.error = "invariant suite failed";
  }
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "scan-angles",   "area-map",
                                                 "evolve",   "ideal-unitary", "verify"};
  return names;
}

CommandOutput run_command(const std::string& name, const RunConfig& cfg) {
  pin_blas_threads();
  CommandOutput failed;
  try {
    if (name == "spectrum") return cmd_spectrum(cfg);
    if (name == "scan-angles") return cmd_scan_angles(cfg);
    if (name == "area-map") return cmd_area_map(cfg);
    if (name == "evolve") return cmd_evolve(cfg);
    if (name == "ideal-unitary") return cmd_ideal_unitary(cfg);
    if (name == "verify") return cmd_verify(cfg);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const ConfigError& e) {
    failed.exit_code = kExitConfig;
    failed.error = e.what();
  } catch (const std::invalid_argument& e) {
    failed.exit_code = kExitConfig;
    failed.error = e.what();
  } catch (const SpectralError& e) {
    failed.exit_code = kExitSpectral;
    failed.error = e.what();
  } catch (const DynamicsError& e) {
    failed.exit_code = kExitDynamics;
    failed.error = e.what();
  } catch (const MpembaError& e) {
    failed.exit_code = kExitMpemba;
    failed.error = e.what();
  } catch (const std::exception& e) {
    failed.exit_code = kExitIo;
    failed.error = e.what();
  }
  return failed;
}

}  // namespace qmpemba
