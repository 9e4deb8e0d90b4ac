#pragma once

#include <string>

#include "geofield/config.hpp"
#include "geofield/run_report.hpp"

namespace geofield {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitConfig = 2, kExitNumeric = 3, kExitIo = 4 };

/// Runs the plan's command, writing CSVs into plan.out_dir and filling `report`.  Throws
/// ConfigError, NumericError or IoError.
void run_command(const RunConfig& cfg, RunReport& report);

/// run_command plus error mapping; report.json is written even when the run fails.
int execute(const RunConfig& cfg, std::string* message = nullptr);

}  // namespace geofield
