#include "klab/ld_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klab/error.hpp"
#include "klab/simulate.hpp"

namespace klab {

namespace {

struct MultiTally {
    std::vector<WeightTally> t;

    void merge(const MultiTally& o) {
        if (t.empty()) t.resize(o.t.size());
        for (std::size_t i = 0; i < o.t.size(); ++i) t[i].merge(o.t[i]);
    }
};

LDProbability from_tally(const WeightTally& t, double x, Estimator e) {
    LDProbability r;
    r.x = x;
    r.estimator = e;
    r.paths = t.paths;
    r.hits = t.hits;
    r.p = {t.mean(), t.stderr_of_mean()};
    r.n_eff = t.effective_size();
    return r;
}

double burn_in(const SREModel& model, std::uint64_t steps, Rng& rng) {
    double y = 0.0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const Pair ab = sample_pair(model, rng);
        y = ab.a * y + ab.b;
    }
    return y;
}

void check_budget(std::uint64_t budget) {
    if (budget < 10000) throw Error(ErrorCode::InvalidArgument, "LD estimation needs a budget of at least 1e4 paths");
}

}  // namespace

std::string to_string(AlphaClass c) { return c == AlphaClass::Low ? "low" : "high"; }
std::string to_string(Estimator e) { return e == Estimator::Crude ? "crude" : "tilted"; }

LDRegion build_region(const KestenProfile& profile, std::uint64_t n, const RegionParams& params) {
    if (n < 16) throw Error(ErrorCode::InvalidArgument, "region needs n >= 16");
    LDRegion r;
    r.n = n;
    const double dn = static_cast<double>(n);
    const double ln = std::log(dn);
    if (profile.alpha <= 2.0) {
        if (!(params.M > 2.0)) throw Error(ErrorCode::InvalidArgument, "region needs M > 2");
        r.alpha_class = AlphaClass::Low;
        r.M = params.M;
        r.x_lo = std::pow(dn, 1.0 / profile.alpha) * std::pow(ln, params.M);
    } else {
        r.alpha_class = AlphaClass::High;
        r.c_n = params.c_n > 0.0 ? params.c_n : std::log(ln);
        r.x_lo = r.c_n * std::sqrt(dn) * ln;
    }
    r.s_n = std::min({std::pow(dn, params.s_exponent), dn / ln, params.s_cap});
    r.x_hi = std::exp(r.s_n);
    if (!(r.x_lo < r.x_hi)) throw Error(ErrorCode::EmptyRegion, "x_lo >= x_hi");
    return r;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count == 0) throw Error(ErrorCode::InvalidArgument, "grid needs 0 < lo <= hi");
    std::vector<double> g;
    if (count == 1 || hi == lo) return {lo};
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        g.push_back(i + 1 == count ? hi : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    g.front() = lo;
    return g;
}

std::vector<double> x_grid(const LDRegion& region, std::size_t count, double span) {
    return log_grid(region.x_lo, std::min(region.x_hi, region.x_lo * span), count);
}

double crude_reach(double scale, double alpha, std::uint64_t budget) {
    const double p_min = std::max(1e-7, 100.0 / static_cast<double>(budget));
    return std::pow(scale / p_min, 1.0 / alpha);
}

Estimate centering(const SREModel& model, const KestenProfile& profile, std::uint64_t n) {
    if (profile.alpha <= 1.0 + 1e-9 || b_zero(model)) return {0.0, 0.0};
    const auto eb = b_mean(model);
    if (!eb) throw Error(ErrorCode::HypothesisViolated, "E B is not finite");
    const Estimate ea = profile.psi_fn->value(1.0);
    const double dn = static_cast<double>(n);
    const double v = dn * *eb / (1.0 - ea.value);
    const double se = std::abs(v) * ea.se / (1.0 - ea.value);
    return {v, se};
}

LDProbability estimate_ld_probability(const SREModel& model, const KestenProfile& profile, std::uint64_t n, double x,
                                      double d_n, Estimator estimator, std::uint64_t budget,
                                      const RandomStream& stream, const ExecPolicy& exec,
                                      const LDSimOptions& options) {
    if (estimator == Estimator::Crude) {
        const double xs[1] = {x};
        return estimate_ld_probabilities_crude(model, profile, n, xs, d_n, budget, stream, exec, options).front();
    }
    check_budget(budget);
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    const std::uint64_t K = burn_in_steps(profile, options.eps_trunc);
    const double lx = x > 1.0 ? std::log(x) : 0.0;
    const double n0 = std::floor(lx / profile.rho);
    if (options.window_factors.empty()) throw Error(ErrorCode::InvalidArgument, "no tilt window lengths");
    const std::uint64_t total = K + n;

    // One component per window length. Starts cover the main stretch and the last
    // lookback * L burn-in steps, so a large initial state is reachable by tilting too.
    struct Component {
        std::uint64_t L;
        std::uint64_t first;
        std::uint64_t W;
    };
    std::vector<Component> comps;
    for (double f : options.window_factors) {
        const auto L = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::llround(f * n0)), 1, n);
        const auto back = static_cast<std::uint64_t>(std::ceil(options.lookback * static_cast<double>(L)));
        const std::uint64_t first = K + 1 > back ? K + 1 - back : 1;
        comps.push_back({L, first, total - L + 2 - first});
    }
    std::uint64_t lowest = total;
    for (const auto& c : comps) lowest = std::min(lowest, c.first);
    const double a = profile.alpha;
    const double log_psi = std::log(profile.psi(a));
    const double J = static_cast<double>(comps.size());

    const double lam = options.defensive;
    if (!(lam >= 0.0 && lam < 1.0)) throw Error(ErrorCode::InvalidArgument, "defensive share must lie in [0, 1)");
    const double log_lam = lam > 0.0 ? std::log(lam) : -std::numeric_limits<double>::infinity();

    const WeightTally t = reduce_chunks<WeightTally>(budget, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        WeightTally out;
        std::vector<double> prefix(total - lowest + 2);
        std::vector<double> terms;
        for (std::uint64_t i = 0; i < m; ++i) {
            const bool plain = lam > 0.0 && rng.uniform() < lam;
            std::uint64_t start = total + 1;
            std::uint64_t L = 0;
            if (!plain) {
                const Component& c = comps[rng.below(comps.size())];
                L = c.L;
                start = c.first + rng.below(c.W);
            }
            double y = 0.0;
            double s = 0.0;
            prefix[0] = 0.0;
            for (std::uint64_t j = 1; j <= total; ++j) {
                const bool tilt = j >= start && j < start + L;
                const double aj = tilt ? sample_a_tilted(model, a, rng) : sample_a(model, rng);
                const double bj = sample_b(model, rng);
                y = aj * y + bj;
                if (!(std::abs(y) <= kStateLimit))
                    throw Error(ErrorCode::StateOverflow, "tilted path left the representable range");
                if (j > K) s += y;
                if (j >= lowest) prefix[j - lowest + 1] = prefix[j - lowest] + std::log(aj);
            }
            if (!(s - d_n > x)) {
                out.add(0.0);
                continue;
            }
            // dQ/dP = lam + (1 - lam) / J * sum_c 1/W_c * sum_w exp(alpha * window_w - L_c log psi(alpha))
            terms.clear();
            for (const auto& c : comps) {
                const double shift = std::log1p(-lam) - std::log(J) - std::log(static_cast<double>(c.W)) -
                                     static_cast<double>(c.L) * log_psi;
                const std::uint64_t off = c.first - lowest;
                for (std::uint64_t w = 0; w < c.W; ++w)
                    terms.push_back(shift + a * (prefix[off + w + c.L] - prefix[off + w]));
            }
            if (lam > 0.0) terms.push_back(log_lam);
            const double top = *std::max_element(terms.begin(), terms.end());
            double acc = 0.0;
            for (double v : terms) acc += std::exp(v - top);
            out.add(std::exp(-(top + std::log(acc))));
        }
        return out;
    });
    LDProbability r = from_tally(t, x, Estimator::Tilted);
    if (r.n_eff < options.min_ess)
        throw Error(ErrorCode::DegenerateWeights,
                    "effective sample size " + std::to_string(r.n_eff) + " below " + std::to_string(options.min_ess));
    return r;
}

std::vector<LDProbability> estimate_ld_probabilities_crude(const SREModel& model, const KestenProfile& profile,
                                                           std::uint64_t n, std::span<const double> xs, double d_n,
                                                           std::uint64_t budget, const RandomStream& stream,
                                                           const ExecPolicy& exec, const LDSimOptions& options) {
    check_budget(budget);
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    const std::uint64_t K = burn_in_steps(profile, options.eps_trunc);
    const std::size_t G = xs.size();
    const MultiTally t = reduce_chunks<MultiTally>(budget, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        MultiTally out;
        out.t.resize(G);
        for (std::uint64_t i = 0; i < m; ++i) {
            const double y0 = burn_in(model, K, rng);
            const double s = simulate_sum(model, y0, n, rng) - d_n;
            for (std::size_t g = 0; g < G; ++g) out.t[g].add(s > xs[g] ? 1.0 : 0.0);
        }
        return out;
    });
    std::vector<LDProbability> r;
    for (std::size_t g = 0; g < G; ++g) r.push_back(from_tally(t.t[g], xs[g], Estimator::Crude));
    return r;
}

Denominator fitted_denominator(const TailConstants& tc, double alpha, std::uint64_t n, double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "fitted denominator needs x > 0");
    const double dn = static_cast<double>(n);
    const double scale = dn * std::pow(x, -alpha);
    Denominator d;
    d.fitted = true;
    d.value = {scale * (tc.c_plus.value + tc.c_minus.value), scale * std::hypot(tc.c_plus.se, tc.c_minus.se)};
    return d;
}

Denominator estimate_denominator(std::span<const double> pool, const TailConstants& tc, double alpha,
                                 std::uint64_t n, double x, std::uint64_t min_exceed) {
    if (pool.size() < 100000) throw Error(ErrorCode::InvalidArgument, "denominator needs a pool of at least 1e5");
    const auto above = static_cast<std::uint64_t>(pool.end() - std::upper_bound(pool.begin(), pool.end(), x));
    const auto below = static_cast<std::uint64_t>(std::lower_bound(pool.begin(), pool.end(), -x) - pool.begin());
    const std::uint64_t count = above + below;
    if (count < min_exceed) return fitted_denominator(tc, alpha, n, x);
    const double N = static_cast<double>(pool.size());
    const double p = static_cast<double>(count) / N;
    const double dn = static_cast<double>(n);
    Denominator d;
    d.value = {dn * p, dn * std::sqrt(p * (1.0 - p) / N)};
    return d;
}

RatioCurve summarize_curve(std::vector<RatioEstimate> points, const Estimate& target, const VerdictRule& rule) {
    RatioCurve c;
    c.target = target;
    c.rule = rule;
    std::size_t in = 0;
    std::vector<Estimate> ratios;
    std::vector<double> devs;
    for (auto& p : points) {
        p.in_band = interval_intersects(p.ratio, rule.k, rule.band_lo * target.value, rule.band_hi * target.value);
        in += p.in_band ? 1 : 0;
        ratios.push_back(p.ratio);
        devs.push_back(std::abs(p.ratio.value - target.value));
    }
    c.fraction_in_band = points.empty() ? 0.0 : static_cast<double>(in) / static_cast<double>(points.size());
    c.flat = !ratios.empty() && common_constant(ratios, rule.k);
    c.median_abs_dev = devs.empty() ? 0.0 : median(devs);
    c.pass = !points.empty() && c.fraction_in_band >= rule.min_fraction;
    c.points = std::move(points);
    return c;
}

RatioCurve ld_ratio_curve(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                          std::span<const double> pool, std::uint64_t n, std::span<const double> grid,
                          Estimator estimator, std::uint64_t budget, const RandomStream& stream,
                          const ExecPolicy& exec, const VerdictRule& rule, const LDSimOptions& options) {
    const double d_n = centering(model, profile, n).value;
    std::vector<LDProbability> probs;
    if (estimator == Estimator::Crude) {
        probs = estimate_ld_probabilities_crude(model, profile, n, grid, d_n, budget, stream, exec, options);
    } else {
        for (std::size_t g = 0; g < grid.size(); ++g)
            probs.push_back(estimate_ld_probability(model, profile, n, grid[g], d_n, estimator, budget,
                                                    stream.child(g), exec, options));
    }
    std::vector<RatioEstimate> pts;
    for (const auto& pr : probs) {
        RatioEstimate r;
        r.n = n;
        r.x = pr.x;
        r.estimator = estimator;
        r.p = pr.p;
        r.n_eff = pr.n_eff;
        r.denom = estimate_denominator(pool, tc, profile.alpha, n, pr.x);
        r.ratio = ratio_estimate(r.p, r.denom.value);
        pts.push_back(r);
    }
    return summarize_curve(std::move(pts), tc.ld_limit, rule);
}

double iid_tail_balance(const IidLaw& law) { return law.symmetric ? 0.5 : 1.0; }

double iid_region_start(const IidLaw& law, std::uint64_t n, double delta) {
    const double dn = static_cast<double>(n);
    if (law.alpha > 2.0) return std::sqrt((law.alpha - 2.0 + 0.5) * dn * std::log(dn));
    return std::pow(dn, delta + 1.0 / law.alpha);
}

std::vector<double> nagaev_grid(const IidLaw& law, std::uint64_t n, std::uint64_t budget, std::size_t count,
                                double delta) {
    const double lo = iid_region_start(law, n, delta);
    const double hi = crude_reach(static_cast<double>(n) * iid_tail_balance(law), law.alpha, budget);
    if (!(hi > lo)) throw Error(ErrorCode::EmptyRegion, "budget cannot reach past b_n");
    return log_grid(lo, hi, count);
}

RatioCurve nagaev_baseline(const IidLaw& law, std::uint64_t n, std::span<const double> grid, std::uint64_t budget,
                           const RandomStream& stream, const ExecPolicy& exec, const VerdictRule& rule) {
    if (!(law.alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "iid law needs alpha > 0");
    check_budget(budget);
    const double dn = static_cast<double>(n);
    const double mean = (!law.symmetric && law.alpha > 1.0) ? law.alpha / (law.alpha - 1.0) : 0.0;
    const double center = law.alpha > 1.0 ? dn * mean : 0.0;
    const double inv = -1.0 / law.alpha;
    const std::size_t G = grid.size();
    const MultiTally t = reduce_chunks<MultiTally>(budget, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        MultiTally out;
        out.t.resize(G);
        for (std::uint64_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::uint64_t k = 0; k < n; ++k) {
                double v = std::pow(rng.uniform(), inv);
                if (law.symmetric && rng.uniform() < 0.5) v = -v;
                s += v;
            }
            s -= center;
            for (std::size_t g = 0; g < G; ++g) out.t[g].add(s > grid[g] ? 1.0 : 0.0);
        }
        return out;
    });
    std::vector<RatioEstimate> pts;
    for (std::size_t g = 0; g < G; ++g) {
        RatioEstimate r;
        r.n = n;
        r.x = grid[g];
        r.estimator = Estimator::Crude;
        const LDProbability pr = from_tally(t.t[g], grid[g], Estimator::Crude);
        r.p = pr.p;
        r.n_eff = pr.n_eff;
        r.denom.value = {dn * std::pow(std::max(grid[g], 1.0), -law.alpha), 0.0};
        r.ratio = ratio_estimate(r.p, r.denom.value);
        pts.push_back(r);
    }
    return summarize_curve(std::move(pts), {iid_tail_balance(law), 0.0}, rule);
}

}  // namespace klab
