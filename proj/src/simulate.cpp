#include "klab/simulate.hpp"

#include <cmath>

#include "klab/error.hpp"

namespace klab {

namespace {

void guard(double y, std::uint64_t step) {
    if (!(std::abs(y) <= kStateLimit))
        throw Error(ErrorCode::StateOverflow, "state left the representable range at step " + std::to_string(step));
}

}  // namespace

PathSample simulate_path(const SREModel& model, double y0, std::uint64_t n, Rng& rng) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "simulate_path needs n >= 1");
    PathSample out;
    out.y0 = y0;
    out.values.reserve(n);
    double y = y0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        const Pair ab = sample_pair(model, rng);
        y = ab.a * y + ab.b;
        guard(y, k);
        out.values.push_back(y);
        out.partial_sum += y;
    }
    return out;
}

double simulate_sum(const SREModel& model, double y0, std::uint64_t n, Rng& rng) {
    double y = y0;
    double s = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) {
        const Pair ab = sample_pair(model, rng);
        y = ab.a * y + ab.b;
        guard(y, k);
        s += y;
    }
    return s;
}

double sample_stationary(const SREModel& model, const KestenProfile& profile, double eps_trunc, Rng& rng) {
    const std::uint64_t steps = burn_in_steps(profile, eps_trunc);
    if (b_zero(model)) return 0.0;
    double y = 0.0;
    for (std::uint64_t k = 1; k <= steps; ++k) {
        const Pair ab = sample_pair(model, rng);
        y = ab.a * y + ab.b;
        guard(y, k);
    }
    return y;
}

std::vector<double> stationary_sample(const SREModel& model, const KestenProfile& profile, std::uint64_t count,
                                      double eps_trunc, const RandomStream& stream, const ExecPolicy& exec) {
    const auto parts = map_chunks<std::vector<double>>(count, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        std::vector<double> v;
        v.reserve(m);
        for (std::uint64_t i = 0; i < m; ++i) v.push_back(sample_stationary(model, profile, eps_trunc, rng));
        return v;
    });
    std::vector<double> out;
    out.reserve(count);
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

ChainSample sample_chain(const SREModel& model, std::uint64_t k, Rng& rng) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "sample_chain needs k >= 1");
    ChainSample c;
    c.k = k;
    for (std::uint64_t i = 0; i < k; ++i) {
        c.pi *= sample_a(model, rng);
        c.eta += c.pi;
    }
    return c;
}

}  // namespace klab
