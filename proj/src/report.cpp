#include "klab/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace klab {

using nlohmann::json;

namespace {

json num(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

json est_schema() {
    return {{"type", "object"},
            {"required", {"value", "se"}},
            {"properties", {{"value", {{"type", {"number", "string"}}}}, {"se", {{"type", {"number", "string"}}}}}}};
}

json obj(std::initializer_list<std::pair<const char*, json>> props) {
    json p = json::object();
    json req = json::array();
    for (const auto& [k, v] : props) {
        p[k] = v;
        req.push_back(k);
    }
    return {{"type", "object"}, {"required", req}, {"properties", p}};
}

json t(const char* type) { return {{"type", type}}; }
json arr(json items) { return {{"type", "array"}, {"items", std::move(items)}}; }

}  // namespace

json report_schema() {
    const json check = obj({{"status", t("string")}, {"detail", t("string")}});
    const json checks = obj({{"neg_log_mean", check},
                             {"nonarithmetic", check},
                             {"nondegenerate", check},
                             {"b_moment", check},
                             {"log_mean", est_schema()},
                             {"all_pass", t("boolean")}});
    const json profile = obj({{"alpha", t("number")},
                              {"rho", est_schema()},
                              {"eps_moment", t("number")},
                              {"psi_kind", t("string")},
                              {"checks", checks}});
    const json constants = obj({{"c_inf", est_schema()},
                                {"c_plus", est_schema()},
                                {"c_minus", est_schema()},
                                {"ld_limit", est_schema()},
                                {"cluster", est_schema()},
                                {"c_inf_method", t("string")},
                                {"c_pm_method", t("string")},
                                {"window", obj({{"lo_frac", t("number")}, {"hi_frac", t("number")}})},
                                {"goldie_samples", t("integer")},
                                {"pool_samples", t("integer")}});
    const json ratio_point = obj({{"n", t("integer")},
                                  {"x", t("number")},
                                  {"estimator", t("string")},
                                  {"p", est_schema()},
                                  {"denom", est_schema()},
                                  {"denom_fitted", t("boolean")},
                                  {"ratio", est_schema()},
                                  {"n_eff", t("number")},
                                  {"in_band", t("boolean")}});
    const json ld_ratio = obj({{"kind", t("string")},
                               {"points", arr(ratio_point)},
                               {"target", est_schema()},
                               {"rule", obj({{"band_lo", t("number")},
                                             {"band_hi", t("number")},
                                             {"min_fraction", t("number")},
                                             {"k", t("number")}})},
                               {"fraction_in_band", t("number")},
                               {"flat", t("boolean")},
                               {"median_abs_dev", t("number")},
                               {"pass", t("boolean")}});
    const json scheme = obj({{"x", t("number")},
                             {"sigma", t("number")},
                             {"n", t("integer")},
                             {"n0", t("integer")},
                             {"m", t("integer")},
                             {"n1", t("integer")},
                             {"n2", t("integer")},
                             {"n3", t("integer")},
                             {"D", t("integer")},
                             {"p", t("integer")},
                             {"p1", t("integer")},
                             {"p3", t("integer")}});
    const json blocks = obj({{"scheme", scheme},
                             {"tail_y", est_schema()},
                             {"s_ratio", est_schema()},
                             {"c_inf", est_schema()},
                             {"s_ratio_ok", t("boolean")},
                             {"ks", arr(t("integer"))},
                             {"eta_ratios", arr(est_schema())},
                             {"eta_consistent", t("boolean")},
                             {"x_score", est_schema()},
                             {"z_score", est_schema()},
                             {"negligible", t("boolean")},
                             {"y0_score", est_schema()},
                             {"shadow_x", arr(t("number"))},
                             {"shadow", arr(est_schema())},
                             {"shadow_bounded", t("boolean")}});
    const json ruin_row = obj({{"u", t("number")},
                               {"mu", t("number")},
                               {"horizon", t("integer")},
                               {"paths", t("integer")},
                               {"crossings", t("integer")},
                               {"psi", est_schema()},
                               {"crossings_doubled", t("integer")},
                               {"psi_doubled", est_schema()},
                               {"predicted", t("number")},
                               {"normalized", est_schema()},
                               {"in_band", t("boolean")},
                               {"horizon_stable", t("boolean")}});
    const json ruin = obj({{"mode", t("string")},
                           {"rows", arr(ruin_row)},
                           {"band_lo", t("number")},
                           {"band_hi", t("number")},
                           {"all_in_band", t("boolean")},
                           {"slope", t("number")},
                           {"slope_se", t("number")},
                           {"slope_ok", t("boolean")},
                           {"monotone", t("boolean")},
                           {"horizon_stable", t("boolean")},
                           {"pass", t("boolean")}});
    const json bound_row = obj({{"case", t("string")},
                                {"inequality", t("string")},
                                {"params", t("string")},
                                {"x", t("number")},
                                {"raw_bound", t("number")},
                                {"capped_bound", t("number")},
                                {"empirical", t("number")},
                                {"empirical_se", t("number")},
                                {"pass", t("boolean")}});
    const json bounds = obj({{"trials", t("integer")},
                             {"petrov_reading", t("string")},
                             {"rows", arr(bound_row)},
                             {"all_pass", t("boolean")}});
    const json verdict = obj({{"pass", t("boolean")}, {"exit_code", t("integer")}, {"tolerances", t("object")}});

    json schema = {
        {"$schema", "http://json-schema.org/draft-07/schema#"},
        {"title", "kesten-lab run report"},
        {"version", kReportSchemaVersion},
        {"type", "object"},
        {"required", {"schema_version", "task", "seed", "streams", "config", "verdict"}},
        {"properties",
         {{"schema_version", {{"const", kReportSchemaVersion}}},
          {"task", t("string")},
          {"seed", t("integer")},
          {"streams", obj({{"master_seed", t("integer")}, {"task_label", t("string")}})},
          {"config", {{"type", "object"}, {"additionalProperties", t("string")}}},
          {"model", t("string")},
          {"profile", profile},
          {"constants", constants},
          {"ld_ratio", ld_ratio},
          {"blocks", blocks},
          {"ruin", ruin},
          {"bounds", bounds},
          {"verdict", verdict},
          {"error", obj({{"code", t("string")}, {"message", t("string")}})}}}};
    return schema;
}

json to_json(const Estimate& e) { return {{"value", num(e.value)}, {"se", num(e.se)}}; }

json to_json(const ConditionReport& r) {
    auto c = [](const Check& ch) { return json{{"status", to_string(ch.status)}, {"detail", ch.detail}}; };
    return {{"neg_log_mean", c(r.neg_log_mean)},
            {"nonarithmetic", c(r.nonarithmetic)},
            {"nondegenerate", c(r.nondegenerate)},
            {"b_moment", c(r.b_moment)},
            {"log_mean", to_json(r.log_mean)},
            {"all_pass", r.all_pass()}};
}

json to_json(const KestenProfile& p) {
    return {{"alpha", num(p.alpha)},
            {"rho", to_json(Estimate{p.rho, p.rho_se})},
            {"eps_moment", num(p.eps_moment)},
            {"psi_kind", p.psi_kind == PsiKind::ClosedForm ? "closed_form" : "monte_carlo"},
            {"checks", to_json(p.checks)}};
}

json to_json(const TailConstants& tc) {
    return {{"c_inf", to_json(tc.c_inf)},
            {"c_plus", to_json(tc.c_plus)},
            {"c_minus", to_json(tc.c_minus)},
            {"ld_limit", to_json(tc.ld_limit)},
            {"cluster", to_json(tc.cluster)},
            {"c_inf_method", to_string(tc.c_inf_method)},
            {"c_pm_method", to_string(tc.c_pm_method)},
            {"window", {{"lo_frac", tc.window.lo_frac}, {"hi_frac", tc.window.hi_frac}}},
            {"goldie_samples", tc.goldie_samples},
            {"pool_samples", tc.pool_samples}};
}

json to_json(const RatioCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back({{"n", p.n},
                       {"x", num(p.x)},
                       {"estimator", to_string(p.estimator)},
                       {"p", to_json(p.p)},
                       {"denom", to_json(p.denom.value)},
                       {"denom_fitted", p.denom.fitted},
                       {"ratio", to_json(p.ratio)},
                       {"n_eff", num(p.n_eff)},
                       {"in_band", p.in_band}});
    return {{"kind", "ld_ratio"},
            {"points", pts},
            {"target", to_json(c.target)},
            {"rule",
             {{"band_lo", c.rule.band_lo},
              {"band_hi", c.rule.band_hi},
              {"min_fraction", c.rule.min_fraction},
              {"k", c.rule.k}}},
            {"fraction_in_band", num(c.fraction_in_band)},
            {"flat", c.flat},
            {"median_abs_dev", num(c.median_abs_dev)},
            {"pass", c.pass}};
}

json to_json(const BlockDiagnostics& d) {
    const auto& s = d.scheme;
    json eta = json::array(), shadow = json::array();
    for (const auto& e : d.eta_ratios) eta.push_back(to_json(e));
    for (const auto& e : d.shadow) shadow.push_back(to_json(e));
    json shadow_x = json::array();
    for (double x : d.shadow_x) shadow_x.push_back(num(x));
    return {{"scheme",
             {{"x", num(s.x)},
              {"sigma", s.sigma},
              {"n", s.n},
              {"n0", s.n0},
              {"m", s.m},
              {"n1", s.n1},
              {"n2", s.n2},
              {"n3", s.n3},
              {"D", s.D},
              {"p", s.p},
              {"p1", s.p1},
              {"p3", s.p3}}},
            {"tail_y", to_json(d.tail_y)},
            {"s_ratio", to_json(d.s_ratio)},
            {"c_inf", to_json(d.c_inf)},
            {"s_ratio_ok", d.s_ratio_ok},
            {"ks", d.ks},
            {"eta_ratios", eta},
            {"eta_consistent", d.eta_consistent},
            {"x_score", to_json(d.x_score)},
            {"z_score", to_json(d.z_score)},
            {"negligible", d.negligible},
            {"y0_score", to_json(d.y0_score)},
            {"shadow_x", shadow_x},
            {"shadow", shadow},
            {"shadow_bounded", d.shadow_bounded}};
}

json to_json(const RuinCurve& c) {
    json rows = json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"u", num(r.est.u)},
                        {"mu", num(r.mu)},
                        {"horizon", r.est.horizon},
                        {"paths", r.est.paths},
                        {"crossings", r.est.crossings},
                        {"psi", to_json(r.est.psi)},
                        {"crossings_doubled", r.est.crossings_doubled},
                        {"psi_doubled", to_json(r.est.psi_doubled)},
                        {"predicted", num(r.predicted)},
                        {"normalized", to_json(r.normalized)},
                        {"in_band", r.in_band},
                        {"horizon_stable", r.horizon_stable}});
    return {{"mode", "sre"},
            {"rows", rows},
            {"band_lo", c.band_lo},
            {"band_hi", c.band_hi},
            {"all_in_band", c.all_in_band},
            {"slope", num(c.slope)},
            {"slope_se", num(c.slope_se)},
            {"slope_ok", c.slope_ok},
            {"monotone", c.monotone},
            {"horizon_stable", c.horizon_stable},
            {"pass", c.pass}};
}

json to_json(const DominanceReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"case", row.config.name},
                        {"inequality", to_string(row.config.bound)},
                        {"params", row.params},
                        {"x", num(row.config.x)},
                        {"raw_bound", num(row.bound.raw)},
                        {"capped_bound", num(row.bound.capped)},
                        {"empirical", num(row.empirical)},
                        {"empirical_se", num(row.empirical_se)},
                        {"pass", row.pass}});
    return {{"trials", r.trials}, {"petrov_reading", to_string(r.reading)}, {"rows", rows}, {"all_pass", r.all_pass}};
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& cell(const std::string& s) {
        sep();
        out_ << csv_field(s);
        return *this;
    }
    CsvWriter& cell(double v) { return cell(format_number(v)); }
    CsvWriter& cell(std::uint64_t v) { return cell(std::to_string(v)); }
    CsvWriter& cell(bool v) { return cell(std::string(v ? "pass" : "fail")); }
    void end() {
        out_ << '\n';
        fresh_ = true;
    }
    std::string str() const { return out_.str(); }

private:
    void sep() {
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }
    std::ostringstream out_;
    bool fresh_ = true;
};

}  // namespace

std::string ld_ratio_csv(const RatioCurve& c) {
    CsvWriter w({"n", "x", "estimator", "p_hat", "p_se", "denom", "denom_se", "ratio", "ratio_se", "n_eff", "target",
                 "verdict"});
    for (const auto& p : c.points) {
        w.cell(p.n).cell(p.x).cell(to_string(p.estimator)).cell(p.p.value).cell(p.p.se);
        w.cell(p.denom.value.value).cell(p.denom.value.se).cell(p.ratio.value).cell(p.ratio.se);
        w.cell(p.n_eff).cell(c.target.value).cell(std::string(p.in_band ? "in_band" : "out_of_band"));
        w.end();
    }
    return w.str();
}

std::string ruin_csv(const RuinCurve& c) {
    CsvWriter w({"u", "mu", "horizon", "budget", "crossings", "psi_hat", "psi_se", "predicted", "normalized",
                 "verdict"});
    for (const auto& r : c.rows) {
        w.cell(r.est.u).cell(r.mu).cell(r.est.horizon).cell(r.est.paths).cell(r.est.crossings);
        w.cell(r.est.psi.value).cell(r.est.psi.se).cell(r.predicted).cell(r.normalized.value);
        w.cell(std::string(r.in_band ? "in_band" : "out_of_band"));
        w.end();
    }
    return w.str();
}

std::string bounds_csv(const DominanceReport& r) {
    CsvWriter w({"inequality", "params", "x", "raw_bound", "capped_bound", "empirical", "empirical_se", "pass"});
    for (const auto& row : r.rows) {
        w.cell(to_string(row.config.bound)).cell("case=" + row.config.name + ";" + row.params).cell(row.config.x);
        w.cell(row.bound.raw).cell(row.bound.capped).cell(row.empirical).cell(row.empirical_se).cell(row.pass);
        w.end();
    }
    return w.str();
}

std::string profile_csv(const KestenProfile& p) {
    CsvWriter w({"quantity", "value", "se"});
    w.cell(std::string("alpha")).cell(p.alpha).cell(0.0);
    w.end();
    w.cell(std::string("rho")).cell(p.rho).cell(p.rho_se);
    w.end();
    w.cell(std::string("eps_moment")).cell(p.eps_moment).cell(0.0);
    w.end();
    w.cell(std::string("log_mean")).cell(p.checks.log_mean.value).cell(p.checks.log_mean.se);
    w.end();
    return w.str();
}

std::string constants_csv(const KestenProfile& p, const TailConstants& tc) {
    std::string out = profile_csv(p);
    CsvWriter w({"quantity", "value", "se"});
    auto row = [&w](const char* name, const Estimate& e) {
        w.cell(std::string(name)).cell(e.value).cell(e.se);
        w.end();
    };
    row("c_inf", tc.c_inf);
    row("c_plus", tc.c_plus);
    row("c_minus", tc.c_minus);
    row("ld_limit", tc.ld_limit);
    row("cluster", tc.cluster);
    const std::string body = w.str();
    return out + body.substr(body.find('\n') + 1);
}

std::string blocks_csv(const BlockDiagnostics& d) {
    CsvWriter w({"quantity", "value", "se", "pass"});
    auto row = [&w](const std::string& name, const Estimate& e, const std::string& verdict) {
        w.cell(name).cell(e.value).cell(e.se).cell(verdict);
        w.end();
    };
    auto pf = [](bool b) { return std::string(b ? "pass" : "fail"); };
    row("tail_y", d.tail_y, "");
    row("s_ratio", d.s_ratio, pf(d.s_ratio_ok));
    row("c_inf", d.c_inf, "");
    for (std::size_t i = 0; i < d.eta_ratios.size(); ++i)
        row("eta_ratio_k" + std::to_string(d.ks[i]), d.eta_ratios[i], pf(d.eta_consistent));
    row("x_score", d.x_score, pf(d.negligible));
    row("z_score", d.z_score, pf(d.negligible));
    row("y0_score", d.y0_score, "");
    for (std::size_t i = 0; i < d.shadow.size(); ++i)
        row("shadow_x" + format_number(d.shadow_x[i]), d.shadow[i], pf(d.shadow_bounded));
    return w.str();
}

}  // namespace klab
