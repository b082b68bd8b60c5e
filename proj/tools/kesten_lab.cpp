#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "klab/config.hpp"
#include "klab/error.hpp"
#include "klab/report.hpp"
#include "klab/runner.hpp"

namespace {

std::string task_list() {
    std::string s;
    for (const auto& t : klab::task_names()) s += (s.empty() ? "" : ", ") + t;
    return s + ", schema";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic recurrence equation laboratory"};
    app.set_version_flag("--version", std::string("report schema ") + klab::kReportSchemaVersion);
    std::string task;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    app.add_option("task", task, "Task to run: " + task_list())->required();
    app.add_option("--config", config_path, "Experiment config file");
    app.add_option("--seed", seed, "Master seed (overrides the config)");
    app.add_option("--workers", workers, "Worker threads (default: KESTEN_LAB_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : klab::kExitError;
    }

    if (task == "schema") {
        std::cout << klab::report_schema().dump(2) << "\n";
        return klab::kExitPass;
    }
    if (!klab::is_task(task)) {
        std::cerr << "unknown task '" << task << "'; expected one of: " << task_list() << "\n"
                  << app.help();
        return klab::kExitError;
    }
    if (config_path.empty()) {
        std::cerr << "--config is required for task '" << task << "'\n";
        return klab::kExitError;
    }

    klab::ExperimentConfig cfg;
    try {
        cfg = klab::parse_config(klab::ConfigFile::load(config_path));
        if (!cfg.task.empty() && cfg.task != task)
            throw klab::Error(klab::ErrorCode::ConfigError,
                              "config task '" + cfg.task + "' does not match command-line task '" + task + "'");
    } catch (const klab::Error& e) {
        std::cerr << e.what() << "\n";
        return klab::kExitError;
    }
    cfg.task = task;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.output.dir = *out_dir;

    const klab::RunOutcome outcome = klab::run_experiment(cfg);
    try {
        klab::write_outputs(outcome, cfg.output.dir);
    } catch (const klab::Error& e) {
        std::cerr << e.what() << "\n";
        return klab::kExitError;
    }
    if (outcome.report.contains("error")) std::cerr << outcome.report["error"]["message"].get<std::string>() << "\n";
    const bool pass = outcome.exit_code == klab::kExitPass;
    std::cout << task << ": " << (pass ? "PASS" : outcome.exit_code == klab::kExitVerdictFailed ? "FAIL" : "ERROR")
              << " (report in " << cfg.output.dir << ")\n";
    return outcome.exit_code;
}
