#include "klab/tail_constants.hpp"

#include <algorithm>
#include <cmath>

#include "klab/error.hpp"
#include "klab/simulate.hpp"

namespace klab {

namespace {

struct MomentTally {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void merge(const MomentTally& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

Estimate window_mean(std::span<const double> desc_values, std::uint64_t N, double alpha, std::uint64_t k_lo,
                     std::uint64_t k_hi) {
    // desc_values[k-1] is the k-th largest value
    double sum = 0.0;
    double var_sum = 0.0;
    const double W = static_cast<double>(k_hi - k_lo + 1);
    for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
        const double y = std::max(desc_values[k - 1], 0.0);
        sum += static_cast<double>(k) / static_cast<double>(N) * std::pow(y, alpha);
        var_sum += (2.0 * static_cast<double>(k - k_lo) + 1.0) / static_cast<double>(k);
    }
    const double mean = sum / W;
    return {mean, mean * std::sqrt(var_sum) / W};
}

}  // namespace

std::string to_string(ConstantMethod m) {
    switch (m) {
        case ConstantMethod::GoldieFormula: return "goldie-formula";
        case ConstantMethod::RankFit: return "rank-fit";
        case ConstantMethod::Derived: return "derived";
    }
    return "unknown";
}

Estimate goldie_c_inf(const SREModel& model, const KestenProfile& profile, std::uint64_t nsamples,
                      const RandomStream& stream, const ExecPolicy& exec, double eps_trunc) {
    if (nsamples < 10000) throw Error(ErrorCode::InvalidArgument, "goldie_c_inf needs at least 1e4 samples");
    const std::uint64_t K = burn_in_steps(profile, eps_trunc);
    const double a = profile.alpha;
    const double scale = 1.0 / (a * profile.rho);
    const MomentTally t =
        reduce_chunks<MomentTally>(nsamples, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
            MomentTally out;
            for (std::uint64_t i = 0; i < m; ++i) {
                const double eta = sample_chain(model, K, rng).eta;
                const double v = (std::pow(1.0 + eta, a) - std::pow(eta, a)) * scale;
                ++out.n;
                out.sum += v;
                out.sum_sq += v * v;
            }
            return out;
        });
    const double n = static_cast<double>(t.n);
    const double mean = t.sum / n;
    const double var = std::max(0.0, (t.sum_sq - t.sum * t.sum / n) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

std::vector<double> stationary_pool(const SREModel& model, const KestenProfile& profile, std::uint64_t count,
                                    const RandomStream& stream, const ExecPolicy& exec, double eps_trunc) {
    std::vector<double> v = stationary_sample(model, profile, count, eps_trunc, stream, exec);
    std::sort(v.begin(), v.end());
    return v;
}

RankFit rank_fit_tail(std::span<const double> sorted, double alpha, double k_lo_frac, double k_hi_frac) {
    if (!(k_lo_frac > 0.0 && k_lo_frac < k_hi_frac && k_hi_frac <= 0.05))
        throw Error(ErrorCode::InvalidArgument, "rank window needs 0 < lo < hi <= 0.05");
    if (!(alpha > 0.0)) throw Error(ErrorCode::DomainError, "alpha must be positive");
    if (sorted.size() < 100000) throw Error(ErrorCode::InvalidArgument, "rank fit needs at least 1e5 samples");
    const std::uint64_t N = sorted.size();
    const auto k_lo = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(k_lo_frac * N)));
    const auto k_hi = std::min<std::uint64_t>(N, static_cast<std::uint64_t>(std::floor(k_hi_frac * N)));
    if (k_hi < k_lo || k_hi - k_lo + 1 < 100)
        throw Error(ErrorCode::InsufficientTail, "fewer than 100 order statistics in the rank window");

    std::vector<double> upper(k_hi);
    std::vector<double> lower(k_hi);
    for (std::uint64_t k = 1; k <= k_hi; ++k) {
        upper[k - 1] = sorted[N - k];
        lower[k - 1] = -sorted[k - 1];
    }
    RankFit r;
    r.k_lo = k_lo;
    r.k_hi = k_hi;
    r.c_plus = window_mean(upper, N, alpha, k_lo, k_hi);
    r.c_minus = window_mean(lower, N, alpha, k_lo, k_hi);
    return r;
}

Estimate hill_cross_check(std::span<const double> sorted, std::uint64_t k) {
    const std::uint64_t N = sorted.size();
    if (k < 100 || static_cast<double>(k) > 0.05 * static_cast<double>(N))
        throw Error(ErrorCode::InvalidArgument, "Hill needs 100 <= k <= 0.05 N");
    const double threshold = sorted[N - k - 1];
    if (!(threshold > 0.0)) throw Error(ErrorCode::InsufficientTail, "non-positive Hill threshold");
    double sum = 0.0;
    for (std::uint64_t i = 1; i <= k; ++i) sum += std::log(sorted[N - i] / threshold);
    if (!(sum > 0.0)) throw Error(ErrorCode::InsufficientTail, "degenerate upper order statistics");
    const double a = static_cast<double>(k) / sum;
    return {a, a / std::sqrt(static_cast<double>(k))};
}

Estimate ld_limit(const TailConstants& tc) {
    const double cp = tc.c_plus.value;
    const double cm = tc.c_minus.value;
    const double ci = tc.c_inf.value;
    const double s = cp + cm;
    if (!(s > 0.0)) throw Error(ErrorCode::DegenerateTails, "c_plus + c_minus <= 0");
    const double value = cp * ci / s;
    const double d_ci = cp / s;
    const double d_cp = ci * cm / (s * s);
    const double d_cm = -cp * ci / (s * s);
    const double var = d_ci * d_ci * tc.c_inf.se * tc.c_inf.se + d_cp * d_cp * tc.c_plus.se * tc.c_plus.se +
                       d_cm * d_cm * tc.c_minus.se * tc.c_minus.se;
    return {value, std::sqrt(var)};
}

TailStudy estimate_tail_constants(const SREModel& model, const KestenProfile& profile, const TailOptions& options,
                                  const RandomStream& stream, const ExecPolicy& exec) {
    TailStudy study;
    TailConstants& tc = study.constants;
    tc.window = options.window;
    tc.goldie_samples = options.goldie_samples;
    tc.pool_samples = options.pool_samples;
    tc.c_inf = goldie_c_inf(model, profile, options.goldie_samples, stream.child("goldie"), exec, options.eps_trunc);
    study.pool = stationary_pool(model, profile, options.pool_samples, stream.child("pool"), exec, options.eps_trunc);
    const RankFit fit = rank_fit_tail(study.pool, profile.alpha, options.window.lo_frac, options.window.hi_frac);
    tc.c_plus = fit.c_plus;
    tc.c_minus = fit.c_minus;
    tc.ld_limit = ld_limit(tc);
    const double k = profile.alpha * profile.rho;
    tc.cluster = {k * tc.c_inf.value, k * tc.c_inf.se};
    return study;
}

}  // namespace klab
