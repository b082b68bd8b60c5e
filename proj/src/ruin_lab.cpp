#include "klab/ruin_lab.hpp"

#include <cmath>

#include "klab/error.hpp"
#include "klab/simulate.hpp"

namespace klab {

namespace {

struct CrossTally {
    std::uint64_t paths = 0;
    std::uint64_t first = 0;   // crossed within the horizon
    std::uint64_t second = 0;  // crossed within twice the horizon

    void merge(const CrossTally& o) {
        paths += o.paths;
        first += o.first;
        second += o.second;
    }
};

Estimate binomial(std::uint64_t hits, std::uint64_t n) {
    const double N = static_cast<double>(n);
    const double p = static_cast<double>(hits) / N;
    return {p, std::sqrt(p * (1.0 - p) / N)};
}

std::uint64_t horizon_for(const RuinExperiment& exp, double u) {
    if (!(exp.horizon_mult >= 8.0)) throw Error(ErrorCode::InvalidArgument, "horizon multiplier must be >= 8");
    if (!(u >= 0.0)) throw Error(ErrorCode::InvalidArgument, "u must be non-negative");
    const auto h = static_cast<std::uint64_t>(std::ceil(exp.horizon_mult * u));
    if (h < exp.min_horizon)
        throw Error(ErrorCode::InvalidArgument, "u below u_min: horizon " + std::to_string(h) + " < " +
                                                    std::to_string(exp.min_horizon));
    return h;
}

RuinEstimate finish(double u, std::uint64_t h, const CrossTally& t) {
    RuinEstimate r;
    r.u = u;
    r.horizon = h;
    r.paths = t.paths;
    r.crossings = t.first;
    r.crossings_doubled = t.second;
    r.psi = binomial(t.first, t.paths);
    r.psi_doubled = binomial(t.second, t.paths);
    return r;
}

RuinCurve summarize(std::vector<RuinRow> rows, double lo, double hi) {
    RuinCurve c;
    c.band_lo = lo;
    c.band_hi = hi;
    c.all_in_band = !rows.empty();
    c.monotone = true;
    c.horizon_stable = true;
    std::vector<double> lx, ly, w;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        r.in_band = r.normalized.value >= lo && r.normalized.value <= hi;
        r.horizon_stable = std::abs(r.est.psi_doubled.value - r.est.psi.value) < r.est.psi.se;
        c.all_in_band = c.all_in_band && r.in_band;
        c.horizon_stable = c.horizon_stable && r.horizon_stable;
        if (i > 0) {
            const auto& prev = rows[i - 1].est.psi;
            if (r.est.psi.value > prev.value + std::hypot(prev.se, r.est.psi.se)) c.monotone = false;
        }
        lx.push_back(std::log(r.est.u));
        ly.push_back(r.normalized.value);
        w.push_back(r.normalized.se > 0.0 ? 1.0 / (r.normalized.se * r.normalized.se) : 1.0);
    }
    if (rows.size() >= 2) {
        const LinearFit f = fit_line(lx, ly, w);
        c.slope = f.slope;
        c.slope_se = f.slope_se;
        c.slope_ok = f.slope - 2.0 * f.slope_se <= 0.0;
    } else {
        c.slope_ok = true;
    }
    c.pass = c.all_in_band && c.slope_ok;
    c.rows = std::move(rows);
    return c;
}

}  // namespace

RuinEstimate estimate_ruin(const SREModel& model, const KestenProfile& profile, const RuinExperiment& exp, double u,
                           const RandomStream& stream, const ExecPolicy& exec) {
    if (!(profile.alpha > 1.0)) throw Error(ErrorCode::HypothesisViolated, "ruin asymptotics need alpha > 1");
    if (!b_nonnegative(model)) throw Error(ErrorCode::HypothesisViolated, "ruin asymptotics need B >= 0");
    if (!(exp.c_plus > 0.0)) throw Error(ErrorCode::HypothesisViolated, "ruin asymptotics need c_plus > 0");
    if (!(exp.mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be positive");
    if (exp.budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be positive");
    const std::uint64_t h = horizon_for(exp, u);
    const std::uint64_t K = burn_in_steps(profile, exp.eps_trunc);
    const double drift = centering(model, profile, 1).value + exp.mu;
    const CrossTally t = reduce_chunks<CrossTally>(exp.budget, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        CrossTally out;
        for (std::uint64_t i = 0; i < m; ++i) {
            double y = 0.0;
            for (std::uint64_t k = 0; k < K; ++k) {
                const Pair ab = sample_pair(model, rng);
                y = ab.a * y + ab.b;
            }
            double w = 0.0;
            ++out.paths;
            for (std::uint64_t k = 1; k <= 2 * h; ++k) {
                const Pair ab = sample_pair(model, rng);
                y = ab.a * y + ab.b;
                w += y - drift;
                if (w > u) {
                    if (k <= h) ++out.first;
                    ++out.second;
                    break;
                }
            }
        }
        return out;
    });
    return finish(u, h, t);
}

RuinEstimate estimate_ruin_iid(const IidLaw& law, const RuinExperiment& exp, double u, const RandomStream& stream,
                               const ExecPolicy& exec) {
    if (law.symmetric) throw Error(ErrorCode::HypothesisViolated, "i.i.d. ruin mode needs non-negative steps");
    if (!(law.alpha > 1.0)) throw Error(ErrorCode::HypothesisViolated, "ruin asymptotics need alpha > 1");
    if (!(exp.mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be positive");
    const std::uint64_t h = horizon_for(exp, u);
    const double drift = law.alpha / (law.alpha - 1.0) + exp.mu;
    const double inv = -1.0 / law.alpha;
    const CrossTally t = reduce_chunks<CrossTally>(exp.budget, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        CrossTally out;
        for (std::uint64_t i = 0; i < m; ++i) {
            double w = 0.0;
            ++out.paths;
            for (std::uint64_t k = 1; k <= 2 * h; ++k) {
                w += std::pow(rng.uniform(), inv) - drift;
                if (w > u) {
                    if (k <= h) ++out.first;
                    ++out.second;
                    break;
                }
            }
        }
        return out;
    });
    return finish(u, h, t);
}

double ruin_asymptote(double c_inf, double alpha, double mu, double u) {
    if (!(alpha > 1.0)) throw Error(ErrorCode::DomainError, "ruin asymptote needs alpha > 1");
    return c_inf * std::pow(u, 1.0 - alpha) / (mu * (alpha - 1.0));
}

double ruin_asymptote_tail(double c_inf, double c_plus, double tail_prob, double alpha, double mu, double u) {
    if (!(alpha > 1.0)) throw Error(ErrorCode::DomainError, "ruin asymptote needs alpha > 1");
    if (!(c_plus > 0.0)) throw Error(ErrorCode::DomainError, "ruin asymptote needs c_plus > 0");
    return c_inf / c_plus * u * tail_prob / (mu * (alpha - 1.0));
}

double iid_ruin_asymptote(double tail_prob, double alpha, double mu, double u) {
    if (!(alpha > 1.0)) throw Error(ErrorCode::DomainError, "ruin asymptote needs alpha > 1");
    return u * tail_prob / (mu * (alpha - 1.0));
}

RuinCurve ruin_curve(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                     const RuinExperiment& exp, const RandomStream& stream, const ExecPolicy& exec) {
    RuinExperiment e = exp;
    if (!(e.c_plus > 0.0)) e.c_plus = tc.c_plus.value;
    std::vector<RuinRow> rows;
    for (std::size_t i = 0; i < e.u_grid.size(); ++i) {
        if (i > 0 && !(e.u_grid[i] > e.u_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "u grid must increase");
        RuinRow r;
        r.est = estimate_ruin(model, profile, e, e.u_grid[i], stream.child(i), exec);
        r.mu = e.mu;
        r.predicted = ruin_asymptote(tc.c_inf.value, profile.alpha, e.mu, e.u_grid[i]);
        r.normalized = ratio_estimate(r.est.psi, {r.predicted, r.predicted * tc.c_inf.se / tc.c_inf.value});
        rows.push_back(r);
    }
    return summarize(std::move(rows), 0.6, 1.5);
}

RuinCurve ruin_curve_iid(const IidLaw& law, const RuinExperiment& exp, const RandomStream& stream,
                         const ExecPolicy& exec) {
    std::vector<RuinRow> rows;
    for (std::size_t i = 0; i < exp.u_grid.size(); ++i) {
        if (i > 0 && !(exp.u_grid[i] > exp.u_grid[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "u grid must increase");
        const double u = exp.u_grid[i];
        RuinRow r;
        r.est = estimate_ruin_iid(law, exp, u, stream.child(i), exec);
        r.mu = exp.mu;
        r.predicted = iid_ruin_asymptote(std::pow(u, -law.alpha), law.alpha, exp.mu, u);
        r.normalized = ratio_estimate(r.est.psi, {r.predicted, 0.0});
        rows.push_back(r);
    }
    return summarize(std::move(rows), 0.75, 1.25);
}

}  // namespace klab
