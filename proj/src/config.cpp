#include "klab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "klab/error.hpp"

namespace klab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& what) {
    throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(line) + ": " + what);
}

/// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    return std::all_of(k.begin(), k.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; });
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
    ConfigFile cfg;
    cfg.source_ = source;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string::npos) {
            section = trim(std::string_view(s).substr(1, s.size() - 2));
            if (!section.empty() && !valid_key(section)) fail_at(source, line, "bad section name '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail_at(source, line, "expected 'key = value'");
        std::string key = trim(std::string_view(s).substr(0, eq));
        std::string value = trim(std::string_view(s).substr(eq + 1));
        if (!valid_key(key)) fail_at(source, line, "bad key '" + key + "'");
        if (!section.empty()) key = section + "." + key;
        if (value.size() >= 2 && value.front() == '"') {
            if (value.back() != '"') fail_at(source, line, "unterminated string for key '" + key + "'");
            value = value.substr(1, value.size() - 2);
        } else if (value.find('"') != std::string::npos) {
            fail_at(source, line, "unterminated string for key '" + key + "'");
        }
        if (!seen.insert(key).second) fail_at(source, line, "duplicate key '" + key + "'");
        cfg.entries_.push_back({key, value, line});
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

SREModel ModelParams::build() const {
    ALaw a = LognormalA{a_mu, a_sigma2};
    if (a_law == "lognormal") a = LognormalA{a_mu, a_sigma2};
    else if (a_law == "uniform") a = UniformA{a_hi};
    else if (a_law == "gamma") a = GammaScaledA{a_shape, a_scale};
    else if (a_law == "const") a = ConstA{a_value};
    else throw Error(ErrorCode::ConfigError, "unknown model.a_law '" + a_law + "'");
    BLaw b = ConstB{b_value};
    if (b_law == "const") b = ConstB{b_value};
    else if (b_law == "normal") b = NormalB{b_mu, b_sigma2};
    else if (b_law == "pareto") b = ParetoB{b_index, b_scale};
    else if (b_law == "exponential") b = ExponentialB{b_rate};
    else throw Error(ErrorCode::ConfigError, "unknown model.b_law '" + b_law + "'");
    return SREModel(a, b, b_sign);
}

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"solve", "constants", "ld-ratio", "nagaev-iid",
                                                "blocks", "ruin",      "bounds",   "validate"};
    return names;
}

bool is_task(const std::string& name) {
    const auto& t = task_names();
    return std::find(t.begin(), t.end(), name) != t.end();
}

namespace {

using Setter = std::function<void(const ConfigFile::Entry&)>;

struct Reader {
    const std::string& source;

    [[noreturn]] void bad(const ConfigFile::Entry& e, const std::string& expected) const {
        fail_at(source, e.line, "key '" + e.key + "': expected " + expected + ", got '" + e.value + "'");
    }

    double number(const ConfigFile::Entry& e) const {
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        if (!e.value.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || e.value.empty()) bad(e, "a number");
        return v;
    }

    std::uint64_t count(const ConfigFile::Entry& e) const {
        const double v = number(e);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) bad(e, "a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }

    bool flag(const ConfigFile::Entry& e) const {
        if (e.value == "true" || e.value == "1") return true;
        if (e.value == "false" || e.value == "0") return false;
        bad(e, "true or false");
    }

    std::vector<double> list(const ConfigFile::Entry& e) const {
        std::string v = e.value;
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']') bad(e, "a list");
            v = v.substr(1, v.size() - 2);
        }
        std::vector<double> out;
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) {
            ConfigFile::Entry sub = e;
            sub.value = trim(item);
            out.push_back(number(sub));
        }
        if (out.empty()) bad(e, "a non-empty list");
        return out;
    }
};

std::map<std::string, Setter> setters(ExperimentConfig& c, const Reader& r) {
    std::map<std::string, Setter> m;
    auto num = [&](const char* k, double& dst) { m[k] = [&r, &dst](const auto& e) { dst = r.number(e); }; };
    auto cnt = [&](const char* k, std::uint64_t& dst) { m[k] = [&r, &dst](const auto& e) { dst = r.count(e); }; };
    auto str = [&](const char* k, std::string& dst) { m[k] = [&dst](const auto& e) { dst = e.value; }; };
    auto flg = [&](const char* k, bool& dst) { m[k] = [&r, &dst](const auto& e) { dst = r.flag(e); }; };

    str("task", c.task);
    cnt("seed", c.seed);
    m["workers"] = [&r, &c](const auto& e) { c.workers = static_cast<int>(r.count(e)); };

    str("model.a_law", c.model.a_law);
    num("model.a_mu", c.model.a_mu);
    num("model.a_sigma2", c.model.a_sigma2);
    num("model.a_hi", c.model.a_hi);
    num("model.a_shape", c.model.a_shape);
    num("model.a_scale", c.model.a_scale);
    num("model.a_value", c.model.a_value);
    str("model.b_law", c.model.b_law);
    num("model.b_value", c.model.b_value);
    num("model.b_mu", c.model.b_mu);
    num("model.b_sigma2", c.model.b_sigma2);
    num("model.b_index", c.model.b_index);
    num("model.b_scale", c.model.b_scale);
    num("model.b_rate", c.model.b_rate);
    num("model.b_sign", c.model.b_sign);

    flg("solve.monte_carlo", c.solve.monte_carlo);
    cnt("solve.mc_samples", c.solve.mc_samples);
    num("solve.tol", c.solve.tol);

    cnt("constants.goldie_samples", c.constants.goldie_samples);
    cnt("constants.pool_samples", c.constants.pool_samples);
    num("constants.window_lo", c.constants.window_lo);
    num("constants.window_hi", c.constants.window_hi);
    num("constants.eps_trunc", c.constants.eps_trunc);

    cnt("ld.n", c.ld.n);
    num("ld.M", c.ld.M);
    num("ld.c_n", c.ld.c_n);
    num("ld.s_exponent", c.ld.s_exponent);
    num("ld.s_cap", c.ld.s_cap);
    cnt("ld.grid_size", c.ld.grid_size);
    num("ld.span", c.ld.span);
    str("ld.estimator", c.ld.estimator);
    cnt("ld.budget", c.ld.budget);
    num("ld.band_lo", c.ld.band_lo);
    num("ld.band_hi", c.ld.band_hi);
    num("ld.min_fraction", c.ld.min_fraction);

    num("nagaev.alpha", c.nagaev.alpha);
    flg("nagaev.symmetric", c.nagaev.symmetric);
    cnt("nagaev.n", c.nagaev.n);
    cnt("nagaev.budget", c.nagaev.budget);
    cnt("nagaev.grid_size", c.nagaev.grid_size);
    num("nagaev.band_lo", c.nagaev.band_lo);
    num("nagaev.band_hi", c.nagaev.band_hi);

    cnt("blocks.n", c.blocks.n);
    num("blocks.x", c.blocks.x);
    num("blocks.sigma", c.blocks.sigma);
    cnt("blocks.budget", c.blocks.budget);
    cnt("blocks.eta_samples", c.blocks.eta_samples);

    num("ruin.mu", c.ruin.mu);
    m["ruin.u_grid"] = [&r, &c](const auto& e) { c.ruin.u_grid = r.list(e); };
    num("ruin.horizon", c.ruin.horizon);
    cnt("ruin.budget", c.ruin.budget);
    flg("ruin.iid", c.ruin.iid);
    num("ruin.iid_alpha", c.ruin.iid_alpha);

    cnt("bounds.trials", c.bounds.trials);
    str("bounds.only", c.bounds.only);
    str("bounds.reading", c.bounds.reading);

    str("output.dir", c.output.dir);
    str("output.format", c.output.format);
    return m;
}

[[noreturn]] void invalid(const std::string& key, const std::string& what) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "': " + what);
}

void need(bool ok, const std::string& key, const std::string& what) {
    if (!ok) invalid(key, what);
}

}  // namespace

ExperimentConfig parse_config(const ConfigFile& file) {
    ExperimentConfig c;
    const Reader reader{file.source()};
    const auto table = setters(c, reader);
    for (const auto& e : file.entries()) {
        const auto it = table.find(e.key);
        if (it == table.end()) fail_at(file.source(), e.line, "unknown key '" + e.key + "'");
        it->second(e);
        c.echo.emplace_back(e.key, e.value);
    }
    if (!c.task.empty() && !is_task(c.task))
        throw Error(ErrorCode::ConfigError, "unknown task '" + c.task + "'");
    return c;
}

void validate_config(const ExperimentConfig& c) {
    need(is_task(c.task), "task", "unknown task '" + c.task + "'");
    need(c.workers >= 0, "workers", "must be non-negative");
    need(c.output.format == "csv" || c.output.format == "json", "output.format", "must be csv or json");
    need(c.model.b_sign == 1.0 || c.model.b_sign == -1.0, "model.b_sign", "must be 1 or -1");
    need(c.solve.tol > 0.0, "solve.tol", "must be positive");
    const std::string& t = c.task;
    const bool needs_constants = t == "constants" || t == "ld-ratio" || t == "blocks" || t == "ruin";
    if (needs_constants) {
        need(c.constants.goldie_samples >= 10'000, "constants.goldie_samples", "must be >= 1e4");
        need(c.constants.pool_samples >= 100'000, "constants.pool_samples", "must be >= 1e5");
        need(c.constants.window_lo > 0.0 && c.constants.window_lo < c.constants.window_hi &&
                 c.constants.window_hi < 1.0,
             "constants.window_lo", "window must satisfy 0 < lo < hi < 1");
        need(c.constants.eps_trunc > 0.0 && c.constants.eps_trunc < 1.0, "constants.eps_trunc", "must be in (0, 1)");
    }
    if (t == "ld-ratio") {
        need(c.ld.n >= 16, "ld.n", "must be >= 16");
        need(c.ld.M > 2.0, "ld.M", "must exceed 2");
        need(c.ld.grid_size >= 2, "ld.grid_size", "must be >= 2");
        need(c.ld.span > 1.0, "ld.span", "must exceed 1");
        need(c.ld.estimator == "tilted" || c.ld.estimator == "crude", "ld.estimator", "must be tilted or crude");
        need(c.ld.budget >= 10'000, "ld.budget", "must be >= 1e4");
        need(c.ld.band_lo > 0.0 && c.ld.band_lo < c.ld.band_hi, "ld.band_lo", "band must satisfy 0 < lo < hi");
        need(c.ld.min_fraction > 0.0 && c.ld.min_fraction <= 1.0, "ld.min_fraction", "must be in (0, 1]");
    }
    if (t == "nagaev-iid") {
        need(c.nagaev.alpha > 0.0, "nagaev.alpha", "must be positive");
        need(c.nagaev.n >= 2, "nagaev.n", "must be >= 2");
        need(c.nagaev.budget >= 10'000, "nagaev.budget", "must be >= 1e4");
        need(c.nagaev.grid_size >= 2, "nagaev.grid_size", "must be >= 2");
        need(c.nagaev.band_lo > 0.0 && c.nagaev.band_lo < c.nagaev.band_hi, "nagaev.band_lo",
             "band must satisfy 0 < lo < hi");
    }
    if (t == "blocks") {
        need(c.blocks.n >= 16, "blocks.n", "must be >= 16");
        need(c.blocks.x == 0.0 || c.blocks.x > 1.0, "blocks.x", "must be 0 or exceed 1");
        need(c.blocks.sigma > 0.0 && c.blocks.sigma < 0.25, "blocks.sigma", "must be in (0, 1/4)");
        need(c.blocks.budget >= 1'000, "blocks.budget", "must be >= 1e3");
        need(c.blocks.eta_samples >= 1'000, "blocks.eta_samples", "must be >= 1e3");
    }
    if (t == "ruin") {
        need(c.ruin.mu > 0.0, "ruin.mu", "must be positive");
        need(c.ruin.horizon >= 8.0, "ruin.horizon", "must be >= 8");
        need(c.ruin.budget >= 1, "ruin.budget", "must be positive");
        need(!c.ruin.u_grid.empty(), "ruin.u_grid", "must be non-empty");
        for (std::size_t i = 0; i < c.ruin.u_grid.size(); ++i) {
            need(c.ruin.u_grid[i] > 0.0, "ruin.u_grid", "entries must be positive");
            if (i > 0) need(c.ruin.u_grid[i] > c.ruin.u_grid[i - 1], "ruin.u_grid", "must be strictly increasing");
        }
        need(!c.ruin.iid || c.ruin.iid_alpha > 1.0, "ruin.iid_alpha", "must exceed 1");
    }
    if (t == "bounds") {
        need(c.bounds.trials >= 1, "bounds.trials", "must be positive");
        const std::set<std::string> ids{"", "prokhorov", "nagaev_sv", "fuk_nagaev", "petrov_max", "levy_ottaviani"};
        need(ids.count(c.bounds.only) == 1, "bounds.only", "unknown inequality '" + c.bounds.only + "'");
        need(c.bounds.reading == "standard" || c.bounds.reading == "literal", "bounds.reading",
             "must be standard or literal");
    }
}

}  // namespace klab
