#include "klab/ld_blocks.hpp"

#include <algorithm>
#include <cmath>

#include "klab/error.hpp"
#include "klab/ld_lab.hpp"
#include "klab/simulate.hpp"

namespace klab {

namespace {

struct BlockTally {
    WeightTally s1;
    WeightTally x1;
    WeightTally z1;

    void merge(const BlockTally& o) {
        s1.merge(o.s1);
        x1.merge(o.x1);
        z1.merge(o.z1);
    }
};

struct BlockSums {
    double x1 = 0.0;
    double s1 = 0.0;
    double z1 = 0.0;
    double s2 = 0.0;
};

void draw_coefficients(const SREModel& model, std::uint64_t len, Rng& rng, std::vector<double>& a,
                       std::vector<double>& b) {
    a.assign(len + 1, 0.0);
    b.assign(len + 1, 0.0);
    for (std::uint64_t k = 1; k <= len; ++k) {
        const Pair ab = sample_pair(model, rng);
        a[k] = ab.a;
        b[k] = ab.b;
    }
}

BlockSums block_sums(const std::vector<double>& a, const std::vector<double>& b, const BlockScheme& sc,
                     bool second) {
    BlockSums out;
    const auto n1 = static_cast<std::uint64_t>(sc.n1);
    const std::uint64_t last = second ? 2 * n1 : n1;
    for (std::uint64_t i = 1; i <= last; ++i) {
        const BlockTerms t = block_terms(a, b, i, sc);
        if (i <= n1) {
            out.x1 += t.x_tilde;
            out.s1 += t.s_tilde;
            out.z1 += t.z_tilde;
        } else {
            out.s2 += t.s_tilde;
        }
    }
    return out;
}

std::uint64_t coefficient_length(const BlockScheme& sc, bool second) {
    const auto n1 = static_cast<std::uint64_t>(sc.n1);
    return std::min<std::uint64_t>(sc.n, (second ? 2 * n1 : n1) + static_cast<std::uint64_t>(sc.n3));
}

/// Mean over draws of the pool's empirical survival at x / eta.
Estimate conditional_tail(std::span<const double> sorted_abs_or_raw, double x, std::span<const double> etas) {
    const double N = static_cast<double>(sorted_abs_or_raw.size());
    std::vector<double> v;
    v.reserve(etas.size());
    for (double e : etas) {
        const double thr = x / e;
        const auto above = sorted_abs_or_raw.end() - std::upper_bound(sorted_abs_or_raw.begin(), sorted_abs_or_raw.end(), thr);
        v.push_back(static_cast<double>(above) / N);
    }
    return mean_estimate(v);
}

Estimate pool_tail(std::span<const double> sorted, double x) {
    const double N = static_cast<double>(sorted.size());
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    const double p = static_cast<double>(above) / N;
    return {p, std::sqrt(p * (1.0 - p) / N)};
}

}  // namespace

BlockScheme block_scheme(const KestenProfile& profile, const SREModel& model, double x, std::uint64_t n,
                         double sigma) {
    (void)model;
    if (!(sigma > 0.0 && sigma < 0.25)) throw Error(ErrorCode::InvalidArgument, "sigma must lie in (0, 1/4)");
    if (!(x > 1.0)) throw Error(ErrorCode::SchemeInvalid, "x must exceed 1");
    BlockScheme s;
    s.x = x;
    s.sigma = sigma;
    s.n = n;
    const double lx = std::log(x);
    s.n0 = static_cast<std::int64_t>(std::floor(lx / profile.rho));
    s.m = static_cast<std::int64_t>(std::floor(std::pow(lx, 0.5 + sigma)));
    s.n1 = s.n0 - s.m;
    s.n2 = s.n0 + s.m;
    const double a = profile.alpha;
    double rate = 0.0;
    double need = 0.0;
    if (a > 1.0 + 1e-9) {
        s.beta = 1.0;
        rate = -std::log(profile.psi(1.0));
        need = a - 1.0;
    } else {
        s.beta = burn_in_beta(a);
        rate = -std::log(profile.psi(s.beta));
        need = a - s.beta;
    }
    if (!(rate > 0.0)) throw Error(ErrorCode::SchemeInvalid, "no contraction rate for D");
    s.D = static_cast<std::int64_t>(std::floor(need / rate)) + 1;
    s.n3 = static_cast<std::int64_t>(std::ceil(static_cast<double>(s.D) * lx));
    if (s.n1 <= 0) throw Error(ErrorCode::SchemeInvalid, "n1 <= 0");
    if (s.n2 >= s.n3) throw Error(ErrorCode::SchemeInvalid, "n2 >= n3");
    const auto nn = static_cast<std::int64_t>(n);
    auto largest = [&](std::int64_t rhs) { return rhs < 0 ? std::int64_t{0} : rhs / s.n1; };
    s.p1 = largest(nn - s.n1 + 1);
    s.p = largest(nn - s.n2);
    s.p3 = largest(nn - s.n3);
    return s;
}

BlockTerms block_terms(std::span<const double> a, std::span<const double> b, std::uint64_t i,
                       const BlockScheme& scheme) {
    if (i < 1 || i > scheme.n) throw Error(ErrorCode::InvalidArgument, "block index out of range");
    const std::int64_t T = std::min<std::int64_t>(scheme.n3, static_cast<std::int64_t>(scheme.n - i));
    if (a.size() < i + static_cast<std::uint64_t>(T) + 1 || b.size() < i + static_cast<std::uint64_t>(T) + 1)
        throw Error(ErrorCode::InvalidArgument, "coefficient arrays too short");
    BlockTerms out;
    double prod = 1.0;
    for (std::int64_t t = 0; t <= T; ++t) {
        if (t > 0) prod *= a[i + static_cast<std::uint64_t>(t) - 1];
        const double term = prod * b[i + static_cast<std::uint64_t>(t)];
        out.u_tilde += term;
        if (t < scheme.n1) {
            out.x_tilde += term;
        } else if (t <= scheme.n2) {
            out.s_tilde += term;
        } else {
            out.z_tilde += term;
        }
    }
    return out;
}

std::vector<Estimate> block_pair_shadow(const SREModel& model, const KestenProfile& profile,
                                        std::span<const double> xs, std::uint64_t n, double sigma,
                                        std::uint64_t budget, const RandomStream& stream, const ExecPolicy& exec) {
    std::vector<Estimate> out;
    for (std::size_t g = 0; g < xs.size(); ++g) {
        const BlockScheme sc = block_scheme(profile, model, xs[g], n, sigma);
        if (static_cast<std::uint64_t>(2 * sc.n1) > n)
            throw Error(ErrorCode::SchemeInvalid, "two S-blocks do not fit in n");
        const std::uint64_t len = coefficient_length(sc, true);
        const WeightTally t =
            reduce_chunks<WeightTally>(budget, stream.child(g), exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
                WeightTally w;
                std::vector<double> a, b;
                for (std::uint64_t i = 0; i < m; ++i) {
                    draw_coefficients(model, len, rng, a, b);
                    const BlockSums s = block_sums(a, b, sc, true);
                    w.add(std::abs(s.s1) > xs[g] && std::abs(s.s2) > xs[g] ? 1.0 : 0.0);
                }
                return w;
            });
        const double scale = std::pow(xs[g], profile.alpha) / std::sqrt(static_cast<double>(sc.n1));
        out.push_back({t.mean() * scale, t.stderr_of_mean() * scale});
    }
    return out;
}

BlockDiagnostics block_diagnostics(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                                   std::span<const double> pool, const BlockScheme& scheme,
                                   const BlockOptions& options, const RandomStream& stream,
                                   const ExecPolicy& exec) {
    if (!(tc.c_plus.value > 0.0)) throw Error(ErrorCode::DegenerateTails, "block diagnostics need c_plus > 0");
    if (pool.size() < 100000) throw Error(ErrorCode::InvalidArgument, "block diagnostics need a pool of at least 1e5");
    BlockDiagnostics d;
    d.scheme = scheme;
    d.c_inf = tc.c_inf;
    const double x = scheme.x;
    const auto n1 = static_cast<std::uint64_t>(scheme.n1);
    const double dn1 = static_cast<double>(n1);

    d.tail_y = pool_tail(pool, x);
    if (!(d.tail_y.value > 0.0)) throw Error(ErrorCode::InsufficientTail, "no pool points beyond x");

    const std::uint64_t len = coefficient_length(scheme, false);
    const BlockTally bt =
        reduce_chunks<BlockTally>(options.budget, stream.child("blocks"), exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
            BlockTally t;
            std::vector<double> a, b;
            for (std::uint64_t i = 0; i < m; ++i) {
                draw_coefficients(model, len, rng, a, b);
                const BlockSums s = block_sums(a, b, scheme, false);
                t.s1.add(s.s1 > x ? 1.0 : 0.0);
                t.x1.add(s.x1 > x ? 1.0 : 0.0);
                t.z1.add(s.z1 > x ? 1.0 : 0.0);
            }
            return t;
        });
    const Estimate base{dn1 * d.tail_y.value, dn1 * d.tail_y.se};
    d.s_ratio = ratio_estimate({bt.s1.mean(), bt.s1.stderr_of_mean()}, base);
    d.x_score = ratio_estimate({bt.x1.mean(), bt.x1.stderr_of_mean()}, base);
    d.z_score = ratio_estimate({bt.z1.mean(), bt.z1.stderr_of_mean()}, base);
    d.s_ratio_ok = d.s_ratio.value >= 0.5 * tc.c_inf.value && d.s_ratio.value <= 1.5 * tc.c_inf.value;
    d.negligible = d.x_score.value < 0.1 && d.z_score.value < 0.1;

    d.ks = {std::max<std::uint64_t>(1, n1 / 4), std::max<std::uint64_t>(1, n1 / 2), n1};
    for (std::size_t j = 0; j < d.ks.size(); ++j) {
        const std::uint64_t k = d.ks[j];
        auto parts = map_chunks<std::vector<double>>(options.eta_samples, stream.child("eta").child(j), exec,
                                                     [&](Rng& rng, std::uint64_t, std::uint64_t m) {
                                                         std::vector<double> v;
                                                         for (std::uint64_t i = 0; i < m; ++i)
                                                             v.push_back(sample_chain(model, k, rng).eta);
                                                         return v;
                                                     });
        std::vector<double> etas;
        for (auto& p : parts) etas.insert(etas.end(), p.begin(), p.end());
        const Estimate num = conditional_tail(pool, x, etas);
        const double dk = static_cast<double>(k);
        d.eta_ratios.push_back(ratio_estimate(num, {dk * d.tail_y.value, dk * d.tail_y.se}));
    }
    d.eta_consistent = common_constant(d.eta_ratios, 3.0);

    {
        std::vector<double> abs_pool(pool.begin(), pool.end());
        for (double& v : abs_pool) v = std::abs(v);
        std::sort(abs_pool.begin(), abs_pool.end());
        const std::uint64_t n = scheme.n;
        auto parts = map_chunks<std::vector<double>>(options.eta_samples, stream.child("y0"), exec,
                                                     [&](Rng& rng, std::uint64_t, std::uint64_t m) {
                                                         std::vector<double> v;
                                                         for (std::uint64_t i = 0; i < m; ++i)
                                                             v.push_back(sample_chain(model, n, rng).eta);
                                                         return v;
                                                     });
        std::vector<double> etas;
        for (auto& p : parts) etas.insert(etas.end(), p.begin(), p.end());
        const Estimate num = conditional_tail(abs_pool, x, etas);
        const Estimate abs_tail = pool_tail(abs_pool, x);
        const double dn = static_cast<double>(n);
        d.y0_score = ratio_estimate(num, {dn * abs_tail.value, dn * abs_tail.se});
    }

    d.shadow_x = log_grid(x, x * options.shadow_span, options.shadow_points);
    d.shadow = block_pair_shadow(model, profile, d.shadow_x, scheme.n, scheme.sigma, options.budget,
                                 stream.child("shadow"), exec);
    std::vector<double> vals;
    for (const auto& e : d.shadow) vals.push_back(e.value);
    const double med = median(vals);
    d.shadow_bounded = std::all_of(vals.begin(), vals.end(), [&](double v) { return v <= 10.0 * med; });
    return d;
}

}  // namespace klab
