#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmpemba/dynamics.hpp"
#include "qmpemba/mpemba.hpp"

namespace qmpemba {

enum class EvolveMode { identity, rotated, ideal };
enum class OutputFormat { csv, json };

struct ScanConfig {
  int n_theta = 180;
  int n_phi = 360;
  /// 0 selects the slowest symmetric-sector mode; k >= 1 selects spectrum row k.
  int mode_index = 0;
};

struct PlaneConfig {
  Axis omega{0.2, 4.0, 30};
  Axis v{0.2, 8.0, 30};
  std::vector<double> alpha_list{0.0, 1.0, 3.0};
};

struct EvolveConfig {
  double t_max_over_tau2 = 20.0;
  int n_samples = 400;
  FitWindow window;
  EvolveMode mode = EvolveMode::identity;
  double theta = 0.0;
  double phi = 0.0;
};

struct OutputConfig {
  std::filesystem::path directory = "qmpemba-out";
  OutputFormat format = OutputFormat::csv;
  bool emit_plot_scripts = false;
};

struct CacheConfig {
  bool enabled = true;
  std::filesystem::path directory = ".qmpemba-cache";
};

struct RunConfig {
  ChainParams model;
  ScanConfig scan;
  PlaneConfig plane;
  EvolveConfig evolve;
  OutputConfig output;
  CacheConfig cache;
  int workers = 1;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `section.key = value` lines; `#` starts a comment.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// QMPEMBA_OUTPUT_DIR -> output.directory, QMPEMBA_WORKERS -> workers.
KeyValues environment_overrides();

/// Applies defaults < file < environment < flags and validates the result.
/// Throws ConfigError naming the offending key.
RunConfig build_config(const KeyValues& file, const KeyValues& env, const KeyValues& flags,
                       bool check_output_dir = true);

/// Every recognised key, in canonical order.
const std::vector<std::string>& config_keys();

nlohmann::json to_json(const RunConfig& cfg);

const char* to_string(EvolveMode m);
const char* to_string(OutputFormat f);

}  // namespace qmpemba
