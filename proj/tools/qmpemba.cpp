#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmpemba/commands.hpp"
#include "qmpemba/errors.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> sets;
  // Convenience flags, kept as text so values reach the config parser verbatim.
  std::vector<std::pair<std::string, std::string>> values;
  bool no_cache = false;
  bool plot_scripts = false;
};

void add_value(CLI::App* sub, Flags& f, const std::string& name, const char* key,
               const std::string& help) {
  sub->add_option_function<std::string>(
      name, [&f, key](const std::string& v) { f.values.emplace_back(key, v); },
      help + " (" + key + ")");
}

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config_path, "config file of 'section.key = value' lines");
  sub->add_option("--set", f.sets, "override a config key, e.g. --set model.omega=2");
  add_value(sub, f, "-N,--n-spins", "model.n_spins", "number of spins");
  add_value(sub, f, "--omega", "model.omega", "transverse field");
  add_value(sub, f, "--v", "model.v", "interaction strength");
  add_value(sub, f, "--alpha", "model.alpha", "power-law exponent");
  add_value(sub, f, "--gamma", "model.gamma", "decay rate");
  add_value(sub, f, "--epsilon", "model.epsilon", "overlap threshold");
  add_value(sub, f, "--n-theta", "scan.n_theta", "theta grid size");
  add_value(sub, f, "--n-phi", "scan.n_phi", "phi grid size");
  add_value(sub, f, "-j,--workers", "workers", "worker threads");
  add_value(sub, f, "-o,--output", "output.directory", "output directory");
  add_value(sub, f, "--format", "output.format", "csv or json");
  add_value(sub, f, "--cache-dir", "cache.directory", "cache directory");
  sub->add_flag("--no-cache", f.no_cache, "disable the spectral cache");
  sub->add_flag("--plot-scripts", f.plot_scripts, "emit gnuplot scripts next to the CSVs");
}

qmpemba::KeyValues flag_values(const Flags& f) {
  qmpemba::KeyValues kv;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw qmpemba::ConfigError("--set expects key=value, got '" + s + "'");
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  kv.insert(kv.end(), f.values.begin(), f.values.end());
  if (f.no_cache) kv.emplace_back("cache.enabled", "false");
  if (f.plot_scripts) kv.emplace_back("output.emit_plot_scripts", "true");
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of relaxation in a dissipative spin chain"};
  app.set_version_flag("--version", QMPEMBA_VERSION);
  app.require_subcommand(1);
  Flags flags;

  std::vector<std::pair<std::string, CLI::App*>> subs = {
      {"spectrum", app.add_subcommand("spectrum", "eigenvalues, sectors and gap report")},
      {"scan-angles", app.add_subcommand("scan-angles", "overlap map over rotation angles")},
      {"area-map", app.add_subcommand("area-map", "acceleration area over the Omega-V plane")},
      {"evolve", app.add_subcommand("evolve", "trajectory and late-time decay fit")},
      {"ideal-unitary", app.add_subcommand("ideal-unitary", "unitary removing the slow-mode overlap")},
      {"verify", app.add_subcommand("verify", "numerical invariant suite (n_spins <= 3)")},
  };
  for (auto& [name, sub] : subs) add_options(sub, flags);
  CLI::App* evolve = subs[3].second;
  add_value(evolve, flags, "--mode", "evolve.mode", "identity, rotated or ideal");
  add_value(evolve, flags, "--theta", "evolve.theta", "rotation polar angle");
  add_value(evolve, flags, "--phi", "evolve.phi", "rotation azimuth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qmpemba::kExitConfig;
  }

  std::string command;
  for (auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  qmpemba::RunConfig cfg;
  try {
    qmpemba::KeyValues file;
    if (!flags.config_path.empty()) file = qmpemba::read_config_file(flags.config_path);
    cfg = qmpemba::build_config(file, qmpemba::environment_overrides(), flag_values(flags));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return qmpemba::kExitConfig;
  }

  const qmpemba::CommandOutput out = qmpemba::run_command(command, cfg);
  for (const auto& line : out.report) std::cout << line << "\n";
  for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
  if (out.exit_code != 0) std::cerr << "error: " << out.error << "\n";
  return out.exit_code;
}
