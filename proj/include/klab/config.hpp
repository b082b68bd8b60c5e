#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "klab/model.hpp"

namespace klab {

/// Flat `key = value` text. Keys may be dotted (`model.a_mu`) or grouped under a
/// `[section]` header; `#` starts a comment; strings may be quoted; lists are
/// comma separated, optionally in brackets.
class ConfigFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };

    static ConfigFile parse(const std::string& text, const std::string& source = "config");
    static ConfigFile load(const std::filesystem::path& path);

    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<Entry> entries_;
};

struct ModelParams {
    std::string a_law = "lognormal";
    double a_mu = -0.25;
    double a_sigma2 = 1.0 / 3.0;
    double a_hi = 2.0;
    double a_shape = 1.0;
    double a_scale = 0.5;
    double a_value = 0.9;
    std::string b_law = "const";
    double b_value = 1.0;
    double b_mu = 0.0;
    double b_sigma2 = 1.0;
    double b_index = 2.0;
    double b_scale = 1.0;
    double b_rate = 1.0;
    double b_sign = 1.0;

    SREModel build() const;
};

struct SolveParams {
    bool monte_carlo = false;
    std::uint64_t mc_samples = 1'000'000;
    double tol = 1e-10;
};

struct ConstantsParams {
    std::uint64_t goldie_samples = 1'000'000;
    std::uint64_t pool_samples = 1'000'000;
    double window_lo = 0.001;
    double window_hi = 0.01;
    double eps_trunc = 1e-10;
};

struct LDParams {
    std::uint64_t n = 200;
    double M = 2.2;
    double c_n = 0.0;
    double s_exponent = 0.9;
    double s_cap = 700.0;
    std::uint64_t grid_size = 8;
    double span = 100.0;
    std::string estimator = "tilted";
    std::uint64_t budget = 100'000;
    double band_lo = 0.6;
    double band_hi = 1.4;
    double min_fraction = 0.8;
};

struct NagaevParams {
    double alpha = 1.5;
    bool symmetric = false;
    std::uint64_t n = 100;
    std::uint64_t budget = 1'000'000;
    std::uint64_t grid_size = 8;
    double band_lo = 0.7;
    double band_hi = 1.3;
};

struct BlocksParams {
    std::uint64_t n = 200;
    double x = 0.0;  // 0 selects the lower edge of the region
    double sigma = 0.1;
    std::uint64_t budget = 1'000'000;
    std::uint64_t eta_samples = 200'000;
};

struct RuinParams {
    double mu = 1.0;
    std::vector<double> u_grid{25.0, 50.0, 100.0};
    double horizon = 32.0;
    std::uint64_t budget = 1'000'000;
    bool iid = false;
    double iid_alpha = 2.5;
};

struct BoundsParams {
    std::uint64_t trials = 100'000;
    std::string only;  // empty runs every inequality
    std::string reading = "standard";
};

struct OutputParams {
    std::string dir = ".";
    std::string format = "csv";
};

struct ExperimentConfig {
    std::string task;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 selects the environment default
    ModelParams model;
    SolveParams solve;
    ConstantsParams constants;
    LDParams ld;
    NagaevParams nagaev;
    BlocksParams blocks;
    RuinParams ruin;
    BoundsParams bounds;
    OutputParams output;
    /// Key/value pairs as read, in file order.
    std::vector<std::pair<std::string, std::string>> echo;
};

const std::vector<std::string>& task_names();
bool is_task(const std::string& name);

/// Reads every entry; unknown keys and malformed values raise ConfigError naming the line.
ExperimentConfig parse_config(const ConfigFile& file);

/// Checks the parameters of `config.task` against the preconditions of the operations it runs.
void validate_config(const ExperimentConfig& config);

}  // namespace klab
