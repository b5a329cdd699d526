#pragma once

#include <string>

#include "config.hpp"

namespace nsp::cli {

/// Exit codes of nsp-stab.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunFailure = 1;
inline constexpr int kExitConfigFailure = 2;

/// Name of the machine-readable marker left behind by a failed run.
inline constexpr const char* kFailureMarker = "FAILED.json";

/// Runs config.experiment, writing its outputs into config.out_dir, and
/// returns the exit code. Messages go to stderr.
int execute(const RunConfig& config);

}  // namespace nsp::cli
