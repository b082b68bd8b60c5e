#include "klab/runner.hpp"

#include <fstream>

#include "klab/bounds.hpp"
#include "klab/error.hpp"
#include "klab/kesten.hpp"
#include "klab/ld_blocks.hpp"
#include "klab/ld_lab.hpp"
#include "klab/parallel.hpp"
#include "klab/report.hpp"
#include "klab/ruin_lab.hpp"
#include "klab/tail_constants.hpp"

namespace klab {

using nlohmann::json;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    RandomStream stream;
    ExecPolicy exec;
    json& report;
    std::map<std::string, std::string>& files;
    bool csv = true;

    void emit_csv(const std::string& body) const {
        if (csv) files[cfg.task + ".csv"] = body;
    }
};

bool unit_b(const SREModel& m) {
    return m.constant_b() && std::get<ConstB>(m.b_law()).value == 1.0 && m.b_sign() == 1.0;
}

TailStudy constants_for(const Context& ctx, const SREModel& model, const KestenProfile& profile) {
    TailOptions opt;
    opt.goldie_samples = ctx.cfg.constants.goldie_samples;
    opt.pool_samples = ctx.cfg.constants.pool_samples;
    opt.window = {ctx.cfg.constants.window_lo, ctx.cfg.constants.window_hi};
    opt.eps_trunc = ctx.cfg.constants.eps_trunc;
    TailStudy study = estimate_tail_constants(model, profile, opt, ctx.stream.child("constants"), ctx.exec);
    ctx.report["constants"] = to_json(study.constants);
    return study;
}

RegionParams region_params(const ExperimentConfig& cfg) {
    RegionParams rp;
    rp.M = cfg.ld.M;
    rp.c_n = cfg.ld.c_n;
    rp.s_exponent = cfg.ld.s_exponent;
    rp.s_cap = cfg.ld.s_cap;
    return rp;
}

bool run_constants(const Context& ctx, const SREModel& model, const KestenProfile& profile) {
    const TailStudy study = constants_for(ctx, model, profile);
    ctx.emit_csv(constants_csv(profile, study.constants));
    json tol = {{"coherence_k", 3.0}};
    if (!unit_b(model)) {
        tol["coherence"] = "not_applicable";
        ctx.report["verdict"]["tolerances"] = tol;
        return true;
    }
    const bool ok = agree_within(study.constants.c_inf, study.constants.c_plus, 3.0);
    tol["coherence"] = ok ? "pass" : "fail";
    ctx.report["verdict"]["tolerances"] = tol;
    return ok;
}

bool run_ld_ratio(const Context& ctx, const SREModel& model, const KestenProfile& profile) {
    const auto& p = ctx.cfg.ld;
    const TailStudy study = constants_for(ctx, model, profile);
    const LDRegion region = build_region(profile, p.n, region_params(ctx.cfg));
    const auto grid = x_grid(region, p.grid_size, p.span);
    const VerdictRule rule{p.band_lo, p.band_hi, p.min_fraction, 3.0};
    const Estimator est = p.estimator == "crude" ? Estimator::Crude : Estimator::Tilted;
    const RatioCurve curve = ld_ratio_curve(model, profile, study.constants, study.pool, p.n, grid, est, p.budget,
                                            ctx.stream.child("ld"), ctx.exec, rule);
    ctx.report["ld_ratio"] = to_json(curve);
    ctx.report["ld_ratio"]["region"] = {{"alpha_class", to_string(region.alpha_class)},
                                        {"x_lo", region.x_lo},
                                        {"x_hi", region.x_hi},
                                        {"s_n", region.s_n},
                                        {"c_n", region.c_n}};
    ctx.emit_csv(ld_ratio_csv(curve));
    ctx.report["verdict"]["tolerances"] = {{"band", {rule.band_lo, rule.band_hi}},
                                           {"min_fraction", rule.min_fraction},
                                           {"k", rule.k}};
    return curve.pass;
}

bool run_nagaev(const Context& ctx) {
    const auto& p = ctx.cfg.nagaev;
    const IidLaw law{p.alpha, p.symmetric};
    const auto grid = nagaev_grid(law, p.n, p.budget, p.grid_size);
    const VerdictRule rule{p.band_lo, p.band_hi, 0.8, 3.0};
    const RatioCurve curve = nagaev_baseline(law, p.n, grid, p.budget, ctx.stream.child("nagaev"), ctx.exec, rule);
    ctx.report["ld_ratio"] = to_json(curve);
    ctx.report["ld_ratio"]["kind"] = "nagaev_iid";
    ctx.emit_csv(ld_ratio_csv(curve));
    ctx.report["verdict"]["tolerances"] = {{"band", {rule.band_lo, rule.band_hi}},
                                           {"min_fraction", rule.min_fraction},
                                           {"k", rule.k}};
    return curve.fraction_in_band >= rule.min_fraction;
}

bool run_blocks(const Context& ctx, const SREModel& model, const KestenProfile& profile) {
    const auto& p = ctx.cfg.blocks;
    const TailStudy study = constants_for(ctx, model, profile);
    const double x = p.x > 0.0 ? p.x : build_region(profile, p.n, region_params(ctx.cfg)).x_lo;
    const BlockScheme scheme = block_scheme(profile, model, x, p.n, p.sigma);
    BlockOptions opt;
    opt.budget = p.budget;
    opt.eta_samples = p.eta_samples;
    const BlockDiagnostics d =
        block_diagnostics(model, profile, study.constants, study.pool, scheme, opt, ctx.stream.child("blocks"), ctx.exec);
    ctx.report["blocks"] = to_json(d);
    ctx.emit_csv(blocks_csv(d));
    ctx.report["verdict"]["tolerances"] = {
        {"s_ratio_band", {0.5, 1.5}}, {"negligible_below", 0.1}, {"eta_k", 3.0}, {"shadow_factor", 10.0}};
    return d.s_ratio_ok && d.negligible && d.eta_consistent;
}

bool run_ruin(const Context& ctx, const SREModel& model, const KestenProfile& profile) {
    const auto& p = ctx.cfg.ruin;
    RuinExperiment exp;
    exp.mu = p.mu;
    exp.u_grid = p.u_grid;
    exp.horizon_mult = p.horizon;
    exp.budget = p.budget;
    RuinCurve curve;
    std::string mode = "sre";
    if (p.iid) {
        mode = "iid";
        curve = ruin_curve_iid(IidLaw{p.iid_alpha, false}, exp, ctx.stream.child("ruin"), ctx.exec);
    } else {
        const TailStudy study = constants_for(ctx, model, profile);
        exp.c_plus = study.constants.c_plus.value;
        exp.eps_trunc = ctx.cfg.constants.eps_trunc;
        curve = ruin_curve(model, profile, study.constants, exp, ctx.stream.child("ruin"), ctx.exec);
    }
    ctx.report["ruin"] = to_json(curve);
    ctx.report["ruin"]["mode"] = mode;
    ctx.emit_csv(ruin_csv(curve));
    ctx.report["verdict"]["tolerances"] = {
        {"band", {curve.band_lo, curve.band_hi}}, {"slope_k", 2.0}, {"horizon_doubling_se", 1.0}};
    return curve.pass && curve.horizon_stable;
}

bool run_bounds(const Context& ctx) {
    const auto& p = ctx.cfg.bounds;
    std::optional<BoundId> only;
    for (BoundId b : {BoundId::Prokhorov, BoundId::NagaevSV, BoundId::FukNagaev, BoundId::Petrov,
                      BoundId::LevyOttaviani})
        if (p.only == to_string(b)) only = b;
    const PetrovReading reading = p.reading == "literal" ? PetrovReading::Literal : PetrovReading::Standard;
    const DominanceReport rep =
        verify_dominance(default_suite(), only, p.trials, ctx.stream.child("bounds"), ctx.exec, reading);
    ctx.report["bounds"] = to_json(rep);
    ctx.emit_csv(bounds_csv(rep));
    ctx.report["verdict"]["tolerances"] = {{"k", 3.0}};
    return rep.all_pass;
}

bool run_task(const Context& ctx) {
    const std::string& task = ctx.cfg.task;
    if (task == "bounds") return run_bounds(ctx);
    if (task == "nagaev-iid") return run_nagaev(ctx);

    const SREModel model = ctx.cfg.model.build();
    ctx.report["model"] = model.describe();
    if (task == "validate") {
        const ConditionReport checks = check_conditions(model);
        ctx.report["profile"] = {{"checks", to_json(checks)}};
        if (!checks.all_pass()) {
            std::string names;
            for (const auto& f : checks.failures()) names += (names.empty() ? "" : ", ") + f;
            throw Error(ErrorCode::InvalidModel, "failed checks: " + names);
        }
    }
    KestenOptions ko;
    ko.tol = ctx.cfg.solve.tol;
    ko.monte_carlo = ctx.cfg.solve.monte_carlo;
    ko.mc_samples = ctx.cfg.solve.mc_samples;
    ko.mc_seed = ctx.stream.child("psi").rng(0).engine()();
    const KestenProfile profile = analyze(model, ko);
    ctx.report["profile"] = to_json(profile);

    if (task == "solve" || task == "validate") {
        ctx.emit_csv(profile_csv(profile));
        ctx.report["verdict"]["tolerances"] = {{"psi_root_tol", ko.tol}};
        return profile.checks.all_pass();
    }
    if (task == "constants") return run_constants(ctx, model, profile);
    if (task == "ld-ratio") return run_ld_ratio(ctx, model, profile);
    if (task == "blocks") return run_blocks(ctx, model, profile);
    if (task == "ruin") return run_ruin(ctx, model, profile);
    throw Error(ErrorCode::ConfigError, "unknown task '" + task + "'");
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    RunOutcome out;
    json& r = out.report;
    r["schema_version"] = kReportSchemaVersion;
    r["task"] = cfg.task;
    r["seed"] = cfg.seed;
    r["streams"] = {{"master_seed", cfg.seed}, {"task_label", cfg.task}};
    json echo = json::object();
    for (const auto& [k, v] : cfg.echo) echo[k] = v;
    r["config"] = echo;
    r["verdict"] = {{"pass", false}, {"exit_code", kExitError}, {"tolerances", json::object()}};
    try {
        validate_config(cfg);
        const Context ctx{cfg,
                          RandomStream(cfg.seed).child(cfg.task),
                          ExecPolicy{cfg.workers > 0 ? cfg.workers : default_workers()},
                          r,
                          out.files,
                          cfg.output.format == "csv"};
        const bool pass = run_task(ctx);
        out.exit_code = pass ? kExitPass : kExitVerdictFailed;
        r["verdict"]["pass"] = pass;
    } catch (const Error& e) {
        out.exit_code = kExitError;
        r["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    r["verdict"]["exit_code"] = out.exit_code;
    out.files["report.json"] = r.dump(2) + "\n";
    return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::ConfigError, "cannot create output directory '" + dir.string() + "'");
    for (const auto& [name, body] : outcome.files) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + (dir / name).string() + "'");
        f << body;
    }
}

}  // namespace klab
