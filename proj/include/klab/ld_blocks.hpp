#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "klab/kesten.hpp"
#include "klab/model.hpp"
#include "klab/parallel.hpp"
#include "klab/stats.hpp"
#include "klab/tail_constants.hpp"

namespace klab {

/// Index scheme splitting each summand by lag into a head (X), a critical window around
/// n0 = floor(log x / rho) of half-width m (S) and a tail up to n3 (Z).
struct BlockScheme {
    double x = 0.0;
    double sigma = 0.1;
    std::uint64_t n = 0;
    std::int64_t n0 = 0;
    std::int64_t m = 0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::int64_t n3 = 0;
    std::int64_t D = 0;
    std::int64_t p = 0;
    std::int64_t p1 = 0;
    std::int64_t p3 = 0;
    double beta = 0.0;
};

BlockScheme block_scheme(const KestenProfile& profile, const SREModel& model, double x, std::uint64_t n,
                         double sigma = 0.1);

struct BlockTerms {
    double x_tilde = 0.0;
    double s_tilde = 0.0;
    double z_tilde = 0.0;
    double u_tilde = 0.0;
};

/// Terms Pi_{i,i+t-1} B_{i+t} for t = 0..min(n3, n - i), grouped by lag. `a` and `b` are
/// 1-based: element 0 is unused and both need at least n + 1 entries.
BlockTerms block_terms(std::span<const double> a, std::span<const double> b, std::uint64_t i,
                       const BlockScheme& scheme);

struct BlockDiagnostics {
    BlockScheme scheme;
    Estimate tail_y;           // P(Y > x)
    Estimate s_ratio;          // P(S_1 > x) / (n1 P(Y > x))
    Estimate c_inf;
    bool s_ratio_ok = false;   // within [0.5, 1.5] c_inf
    std::vector<std::uint64_t> ks;
    std::vector<Estimate> eta_ratios;  // P(eta_k Y > x) / (k P(Y > x))
    bool eta_consistent = false;
    Estimate x_score;          // P(X_1 > x) / (n1 P(Y > x))
    Estimate z_score;          // P(Z_1 > x) / (n1 P(Y > x))
    bool negligible = false;   // both scores below 0.1
    Estimate y0_score;         // P(|Y_0| eta_n > x) / (n P(|Y| > x))
    std::vector<double> shadow_x;
    std::vector<Estimate> shadow;  // P(|S_1| > x, |S_2| > x) x^alpha / n1^0.5
    bool shadow_bounded = false;   // every value within 10x the median
};

struct BlockOptions {
    std::uint64_t budget = 1'000'000;
    std::uint64_t eta_samples = 200'000;
    std::size_t shadow_points = 4;
    double shadow_span = 4.0;
};

/// P(|S_1| > x, |S_2| > x) x^alpha / n1^0.5 at each x, each with its own scheme.
std::vector<Estimate> block_pair_shadow(const SREModel& model, const KestenProfile& profile,
                                        std::span<const double> xs, std::uint64_t n, double sigma,
                                        std::uint64_t budget, const RandomStream& stream,
                                        const ExecPolicy& exec = {});

/// Runs the block-level checks against an ascending stationary pool.
BlockDiagnostics block_diagnostics(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                                   std::span<const double> pool, const BlockScheme& scheme,
                                   const BlockOptions& options, const RandomStream& stream,
                                   const ExecPolicy& exec = {});

}  // namespace klab
