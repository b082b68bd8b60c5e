#include "klab/kesten.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "klab/error.hpp"
#include "klab/random.hpp"

namespace klab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kHMax = 64.0;

double closed_psi(const ALaw& law, double h) {
    return std::visit(overloaded{
                          [&](const LognormalA& l) { return std::exp(h * l.mu + 0.5 * h * h * l.sigma2); },
                          [&](const UniformA& u) { return std::pow(u.hi, h) / (h + 1.0); },
                          [&](const GammaScaledA& g) {
                              return std::exp(h * std::log(g.scale) + std::lgamma(g.shape + h) - std::lgamma(g.shape));
                          },
                          [&](const ConstA& c) { return std::pow(c.value, h); },
                      },
                      law);
}

double closed_dpsi(const ALaw& law, double h) {
    return std::visit(overloaded{
                          [&](const LognormalA& l) { return closed_psi(law, h) * (l.mu + h * l.sigma2); },
                          [&](const UniformA& u) {
                              const double c = std::pow(u.hi, h);
                              return c * (std::log(u.hi) / (h + 1.0) - 1.0 / ((h + 1.0) * (h + 1.0)));
                          },
                          [&](const GammaScaledA& g) {
                              return closed_psi(law, h) * (std::log(g.scale) + boost::math::digamma(g.shape + h));
                          },
                          [&](const ConstA& c) { return closed_psi(law, h) * std::log(c.value); },
                      },
                      law);
}

double closed_log_mean(const ALaw& law) {
    return std::visit(overloaded{
                          [](const LognormalA& l) { return l.mu; },
                          [](const UniformA& u) { return std::log(u.hi) - 1.0; },
                          [](const GammaScaledA& g) { return std::log(g.scale) + boost::math::digamma(g.shape); },
                          [](const ConstA& c) { return std::log(c.value); },
                      },
                      law);
}

Estimate sample_mean(const std::vector<double>& log_a, double h, bool with_log) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double la : log_a) {
        double v = std::exp(h * la);
        if (with_log) v *= la;
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(log_a.size());
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

}  // namespace

MomentFunction::MomentFunction(const SREModel& model) : model_(model), kind_(PsiKind::ClosedForm) {}

MomentFunction::MomentFunction(const SREModel& model, std::uint64_t samples, std::uint64_t seed)
    : model_(model), kind_(PsiKind::MonteCarlo) {
    if (samples < 2) throw Error(ErrorCode::InvalidArgument, "MC moment function needs at least 2 samples");
    auto draws = std::make_shared<std::vector<double>>();
    draws->reserve(samples);
    Rng rng = RandomStream(seed).child("psi").rng(0);
    for (std::uint64_t i = 0; i < samples; ++i) draws->push_back(std::log(sample_a(model, rng)));
    log_a_ = std::move(draws);
}

Estimate MomentFunction::value(double h) const {
    if (!(h >= 0.0)) throw Error(ErrorCode::DomainError, "psi needs h >= 0");
    if (kind_ == PsiKind::ClosedForm) return {closed_psi(model_.a_law(), h), 0.0};
    return sample_mean(*log_a_, h, false);
}

Estimate MomentFunction::derivative(double h) const {
    if (!(h >= 0.0)) throw Error(ErrorCode::DomainError, "psi' needs h >= 0");
    if (kind_ == PsiKind::ClosedForm) return {closed_dpsi(model_.a_law(), h), 0.0};
    return sample_mean(*log_a_, h, true);
}

Estimate MomentFunction::log_mean() const {
    if (kind_ == PsiKind::ClosedForm) return {closed_log_mean(model_.a_law()), 0.0};
    Estimate e = mean_estimate(*log_a_);
    return e;
}

Estimate psi(const SREModel& model, double h) { return MomentFunction(model).value(h); }

Estimate e_log_a(const SREModel& model) { return MomentFunction(model).log_mean(); }

double solve_alpha(const MomentFunction& psi_fn, double tol, std::optional<double> hint) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    const Estimate lm = psi_fn.log_mean();
    if (!(lm.value < 0.0)) throw Error(ErrorCode::InvalidModel, "E log A >= 0, no Kesten root");
    auto f = [&](double h) { return psi_fn.value(h).value - 1.0; };

    double lo = 0.0;
    double hi = 0.0;
    bool bracketed = false;
    if (hint && *hint > 0.0) {
        lo = 0.5 * *hint;
        hi = 1.5 * *hint;
        bracketed = hi <= kHMax && f(lo) < 0.0 && f(hi) > 0.0;
    }
    if (!bracketed) {
        hi = 1.0;
        while (!(f(hi) > 0.0)) {
            hi *= 2.0;
            if (hi > kHMax) throw Error(ErrorCode::NoRoot, "psi(h) <= 1 for all h up to 64");
        }
        lo = 0.5 * hi;
        while (!(f(lo) < 0.0)) {
            lo *= 0.5;
            if (lo < 1e-12) throw Error(ErrorCode::NoRoot, "no h with psi(h) < 1 found");
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double alpha = std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
    const Estimate at = psi_fn.value(alpha);
    const double allowed = psi_fn.kind() == PsiKind::ClosedForm ? tol : std::max(tol, 3.0 * at.se);
    if (std::abs(at.value - 1.0) > allowed) {
        std::ostringstream os;
        os << "bisection ended with |psi(alpha) - 1| = " << std::abs(at.value - 1.0);
        throw Error(ErrorCode::NoRoot, os.str());
    }
    return alpha;
}

double solve_alpha(const SREModel& model, double tol) { return solve_alpha(MomentFunction(model), tol); }

Estimate rho(const MomentFunction& psi_fn, double alpha) {
    const Estimate r = psi_fn.derivative(alpha);
    if (!(r.value > 0.0)) throw Error(ErrorCode::NonPositiveRho, "rho = psi'(alpha) <= 0");
    return r;
}

Estimate rho(const SREModel& model, double alpha) { return rho(MomentFunction(model), alpha); }

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Unknown: return "unknown";
    }
    return "unknown";
}

bool ConditionReport::all_pass() const { return failures().empty(); }

std::vector<std::string> ConditionReport::failures() const {
    std::vector<std::string> out;
    if (neg_log_mean.status != CheckStatus::Pass) out.emplace_back("neg_log_mean");
    if (nonarithmetic.status != CheckStatus::Pass) out.emplace_back("nonarithmetic");
    if (nondegenerate.status != CheckStatus::Pass) out.emplace_back("nondegenerate");
    if (b_moment.status != CheckStatus::Pass) out.emplace_back("b_moment");
    return out;
}

ConditionReport check_conditions(const SREModel& model, std::optional<double> alpha, double eps) {
    ConditionReport r;
    r.log_mean = e_log_a(model);
    {
        std::ostringstream os;
        os << "E log A = " << r.log_mean.value;
        r.neg_log_mean = {r.log_mean.value < 0.0 ? CheckStatus::Pass : CheckStatus::Fail, os.str()};
    }
    if (model.constant_a()) {
        r.nonarithmetic = {CheckStatus::Fail, "point-mass A has arithmetic log A"};
    } else {
        r.nonarithmetic = {CheckStatus::Pass, "continuous A-law"};
    }
    if (model.constant_a() && model.constant_b()) {
        r.nondegenerate = {CheckStatus::Fail, "constant (A, B) has a deterministic fixed point"};
    } else {
        r.nondegenerate = {CheckStatus::Pass, "P(Ax + B = x) < 1 for every x"};
    }
    if (!alpha) {
        r.b_moment = {CheckStatus::Unknown, "alpha not available"};
    } else {
        const double h = *alpha + eps;
        std::ostringstream os;
        os << "E|B|^" << h;
        const bool ok = eps > 0.0 && b_moment_finite(model, h);
        os << (ok ? " finite" : (eps > 0.0 ? " infinite" : ": no positive eps available"));
        r.b_moment = {ok ? CheckStatus::Pass : CheckStatus::Fail, os.str()};
    }
    return r;
}

double eps_moment(const SREModel& model, double alpha) {
    for (double eps : {0.5, 0.25, 0.1}) {
        const double h = alpha + eps;
        if (std::isfinite(psi(model, h).value) && b_moment_finite(model, h)) return eps;
    }
    return 0.0;
}

KestenProfile analyze(const SREModel& model, const KestenOptions& options) {
    KestenProfile p;
    p.psi_fn = options.monte_carlo ? std::make_shared<MomentFunction>(model, options.mc_samples, options.mc_seed)
                                   : std::make_shared<MomentFunction>(model);
    p.psi_kind = p.psi_fn->kind();
    p.checks = check_conditions(model);
    if (options.strict && p.checks.nonarithmetic.status == CheckStatus::Fail)
        throw Error(ErrorCode::InvalidModel, "nonarithmetic check failed: " + p.checks.nonarithmetic.detail);
    if (options.strict && p.checks.nondegenerate.status == CheckStatus::Fail)
        throw Error(ErrorCode::InvalidModel, "nondegenerate check failed: " + p.checks.nondegenerate.detail);
    p.alpha = solve_alpha(*p.psi_fn, options.tol);
    const Estimate r = rho(*p.psi_fn, p.alpha);
    p.rho = r.value;
    p.rho_se = r.se;
    p.eps_moment = eps_moment(model, p.alpha);
    p.checks = check_conditions(model, p.alpha, p.eps_moment);
    if (options.strict && !p.checks.all_pass()) {
        std::string names;
        for (const auto& f : p.checks.failures()) names += (names.empty() ? "" : ", ") + f;
        throw Error(ErrorCode::InvalidModel, "hypothesis check failed: " + names + " (" + p.checks.b_moment.detail + ")");
    }
    return p;
}

double burn_in_beta(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::DomainError, "alpha must be positive");
    return alpha <= 1.0 ? 0.5 * alpha : std::min(1.0, 0.5 * alpha + 0.25);
}

std::uint64_t burn_in_steps(const KestenProfile& profile, double eps_trunc) {
    if (!(eps_trunc > 0.0 && eps_trunc < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps_trunc must lie in (0, 1)");
    const double beta = burn_in_beta(profile.alpha);
    const double pb = profile.psi(beta);
    if (!(pb < 1.0) || !(pb > 0.0)) throw Error(ErrorCode::InvalidModel, "psi(beta) >= 1, no contraction for burn-in");
    return static_cast<std::uint64_t>(std::ceil(std::log(eps_trunc) / std::log(pb)));
}

ExpansionReport psi_expansion_check(const KestenProfile& profile, std::span<const double> gamma_grid) {
    ExpansionReport r;
    r.C = 0.0;
    std::vector<double> lx;
    std::vector<double> ly;
    for (double g : gamma_grid) {
        const double v = profile.psi(profile.alpha + g);
        r.C = std::max(r.C, v * std::exp(-profile.rho * g));
        const double resid = std::abs(v - 1.0 - profile.rho * g);
        if (g != 0.0 && resid > 0.0) {
            lx.push_back(std::log(std::abs(g)));
            ly.push_back(std::log(resid));
        }
    }
    if (gamma_grid.empty()) r.C = 1.0;
    r.bound_holds = true;
    for (double g : gamma_grid) {
        const double v = profile.psi(profile.alpha + g);
        if (v > r.C * std::exp(profile.rho * g) * (1.0 + 1e-12)) r.bound_holds = false;
    }
    if (lx.size() >= 2) {
        r.residual_slope = fit_line(lx, ly).slope;
        r.slope_ok = r.residual_slope >= 1.9;
    }
    return r;
}

std::vector<double> default_gamma_grid(const KestenProfile& profile) {
    const double cap = profile.eps_moment > 0.0 ? 0.5 * profile.eps_moment : 0.05;
    std::vector<double> grid;
    for (int i = -5; i <= 5; ++i) {
        const double g = 0.01 * i;
        if (std::abs(g) <= cap + 1e-15 && profile.alpha + g > 0.0) grid.push_back(g);
    }
    return grid;
}

}  // namespace klab
