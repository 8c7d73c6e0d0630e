#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmpemba/model.hpp"

namespace qmpemba {

struct CheckResult {
  std::string name;
  double value = 0.0;      ///< measured defect
  double tolerance = 0.0;
  bool passed = false;
  bool skipped = false;
  std::string note;
};

/// Numerical invariants of the generator, its eigensystem and the
/// propagators at one parameter point. Requires n_spins <= 3.
std::vector<CheckResult> run_invariant_suite(const ChainParams& p, std::uint64_t seed = 20240611);

}  // namespace qmpemba
