#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qmpemba/config.hpp"

namespace qmpemba {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitConfig = 2,
  kExitSpectral = 3,
  kExitDynamics = 4,
  kExitMpemba = 5,
  kExitVerification = 6,
};

struct CommandOutput {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> report;  ///< human-readable summary lines
  std::string error;
};

/// spectrum.csv + gap.json
CommandOutput cmd_spectrum(const RunConfig& cfg);
/// scan.csv + scan_meta.json
CommandOutput cmd_scan_angles(const RunConfig& cfg);
/// area_map.csv + area_map_meta.json; exit 0 when at least 90% of cells succeed.
CommandOutput cmd_area_map(const RunConfig& cfg);
/// evolve.csv + fit.json for cfg.evolve.mode
CommandOutput cmd_evolve(const RunConfig& cfg);
/// ideal_unitary.json
CommandOutput cmd_ideal_unitary(const RunConfig& cfg);
/// verify.json; exit 6 if any invariant fails.
CommandOutput cmd_verify(const RunConfig& cfg);

const std::vector<std::string>& command_names();

/// Dispatches by name and maps exceptions to exit codes:
/// ConfigError/invalid_argument 2, SpectralError 3, DynamicsError 4,
/// MpembaError 5, anything else 1.
CommandOutput run_command(const std::string& name, const RunConfig& cfg);

/// Keeps the BLAS backend single-threaded so results do not depend on its
/// internal thread count. No-op when the backend has no such control.
void pin_blas_threads();

}  // namespace qmpemba
