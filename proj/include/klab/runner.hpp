#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "klab/config.hpp"

namespace klab {

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitVerdictFailed = 2 };

struct RunOutcome {
    int exit_code = kExitPass;
    nlohmann::json report;
    /// File name to contents; always holds report.json, plus <task>.csv for csv output.
    std::map<std::string, std::string> files;
};

/// Runs the task pipeline (model analysis, then the task). Library errors are caught and
/// recorded in the report's error block with exit code 1.
RunOutcome run_experiment(const ExperimentConfig& config);

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

}  // namespace klab
