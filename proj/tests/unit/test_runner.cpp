#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "klab/config.hpp"
#include "klab/report.hpp"
#include "klab/runner.hpp"

using namespace klab;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_config(ConfigFile::parse(text, "t.cfg")); }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("schema matches the golden file") {
    const std::string golden = read_file(KLAB_GOLDEN_DIR "/report_schema.json");
    CHECK(report_schema().dump(2) + "\n" == golden);
    const auto s = nlohmann::json::parse(golden);
    CHECK(s["version"] == kReportSchemaVersion);
    for (const char* block : {"profile", "constants", "ld_ratio", "blocks", "ruin", "bounds"})
        CHECK(s["properties"].contains(block));
}

TEST_CASE("solve on a uniform multiplier") {
    auto c = parse("task = solve\nmodel.a_law = uniform\nmodel.a_hi = 2\n");
    const RunOutcome out = run_experiment(c);
    CHECK(out.exit_code == kExitPass);
    CHECK(std::abs(out.report["profile"]["alpha"].get<double>() - 1.0) <= 1e-10);
    CHECK(out.files.count("solve.csv") == 1);
    CHECK(out.files.count("report.json") == 1);
    CHECK(out.report["config"]["model.a_hi"] == "2");
    CHECK(out.report["schema_version"] == kReportSchemaVersion);
}

TEST_CASE("validate names the failed check") {
    auto c = parse("task = validate\nmodel.a_law = const\nmodel.a_value = 0.9\n");
    const RunOutcome out = run_experiment(c);
    CHECK(out.exit_code == kExitError);
    const std::string msg = out.report["error"]["message"];
    CHECK(msg.find("nonarithmetic") != std::string::npos);
    CHECK(out.report["profile"]["checks"]["nonarithmetic"]["status"] == "fail");
}

TEST_CASE("hypothesis violations surface as errors") {
    auto c = parse("task = ruin\nmodel.b_law = normal\nruin.budget = 10\nruin.horizon = 40\n"
                   "constants.goldie_samples = 10000\nconstants.pool_samples = 100000\n");
    const RunOutcome out = run_experiment(c);
    CHECK(out.exit_code == kExitError);
    CHECK(out.report["error"]["code"] == "HypothesisViolated");
}

TEST_CASE("verdict failure exits with 2") {
    auto c = parse("task = bounds\nbounds.only = petrov_max\nbounds.reading = literal\nbounds.trials = 20000\n");
    const RunOutcome out = run_experiment(c);
    CHECK(out.exit_code == kExitVerdictFailed);
    CHECK(out.report["verdict"]["pass"] == false);
}

TEST_CASE("csv output is identical across worker counts") {
    const std::string text = "task = bounds\nbounds.trials = 5000\nseed = 99\n";
    auto one = parse(text);
    one.workers = 1;
    auto four = parse(text);
    four.workers = 4;
    const RunOutcome a = run_experiment(one);
    const RunOutcome b = run_experiment(four);
    CHECK(a.exit_code == kExitPass);
    REQUIRE(a.files.count("bounds.csv") == 1);
    CHECK(a.files.at("bounds.csv") == b.files.at("bounds.csv"));
    CHECK(a.files.at("report.json") == b.files.at("report.json"));
    const std::string header = a.files.at("bounds.csv").substr(0, a.files.at("bounds.csv").find('\n'));
    CHECK(header == "inequality,params,x,raw_bound,capped_bound,empirical,empirical_se,pass");

    auto other_seed = parse(text);
    other_seed.seed = 100;
    CHECK(run_experiment(other_seed).files.at("bounds.csv") != a.files.at("bounds.csv"));
}

TEST_CASE("ruin csv columns and json-only output") {
    auto c = parse("task = ruin\nruin.iid = true\nruin.u_grid = 25\nruin.horizon = 40\nruin.budget = 2000\n"
                   "output.format = json\n");
    const RunOutcome out = run_experiment(c);
    CHECK(out.exit_code != kExitError);
    CHECK(out.files.count("ruin.csv") == 0);
    CHECK(out.report["ruin"]["mode"] == "iid");
    c.output.format = "csv";
    const RunOutcome csv = run_experiment(c);
    const std::string body = csv.files.at("ruin.csv");
    CHECK(body.substr(0, body.find('\n')) == "u,mu,horizon,budget,crossings,psi_hat,psi_se,predicted,normalized,verdict");
}

TEST_CASE("outputs are written to disk") {
    const auto dir = std::filesystem::temp_directory_path() / "klab_runner_test";
    std::filesystem::remove_all(dir);
    auto c = parse("task = solve\n");
    write_outputs(run_experiment(c), dir);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "solve.csv"));
    std::filesystem::remove_all(dir);
}
