#pragma once

#include <string>
#include <vector>

namespace frameforge {

struct ExperimentOutcome {
    int exit_code = 0;  // 0 success, 1 input error, 2 certification refusal
    std::string message;
    std::vector<std::string> files_written;
};

/// Runs the experiment described by a JSON config file; writes a CSV per the
/// module contract plus a JSON manifest (config echo, library version, fitted
/// constants). Identical config + seed gives byte-identical outputs.
ExperimentOutcome run_experiment(const std::string& config_path);

/// Compiled-in invariant battery.
ExperimentOutcome run_selftest();

/// Human-readable schema of the config format.
std::string config_schema();

std::string library_version();

}  // namespace frameforge
