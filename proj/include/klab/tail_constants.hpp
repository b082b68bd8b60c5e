#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "klab/kesten.hpp"
#include "klab/model.hpp"
#include "klab/parallel.hpp"
#include "klab/stats.hpp"

namespace klab {

enum class ConstantMethod { GoldieFormula, RankFit, Derived };
std::string to_string(ConstantMethod m);

struct RankWindow {
    double lo_frac = 0.001;
    double hi_frac = 0.01;
};

/// Tail constants of the stationary law: P(Y > x) ~ c_plus x^-alpha, P(Y <= -x) ~ c_minus x^-alpha.
/// `cluster` is alpha * rho * c_inf = E[(1 + eta)^alpha - eta^alpha], the growth rate of E eta_k^alpha.
struct TailConstants {
    Estimate c_inf;
    Estimate c_plus;
    Estimate c_minus;
    Estimate ld_limit;
    Estimate cluster;
    ConstantMethod c_inf_method = ConstantMethod::GoldieFormula;
    ConstantMethod c_pm_method = ConstantMethod::RankFit;
    RankWindow window;
    std::uint64_t goldie_samples = 0;
    std::uint64_t pool_samples = 0;
};

/// Mean of ((1 + eta)^alpha - eta^alpha)/(alpha rho) over perpetuity draws eta = A_1 + A_1 A_2 + ...
/// truncated at the burn-in length. Uses only the A-law of the model.
Estimate goldie_c_inf(const SREModel& model, const KestenProfile& profile, std::uint64_t nsamples,
                      const RandomStream& stream, const ExecPolicy& exec = {}, double eps_trunc = 1e-10);

/// Stationary draws sorted ascending.
std::vector<double> stationary_pool(const SREModel& model, const KestenProfile& profile, std::uint64_t count,
                                    const RandomStream& stream, const ExecPolicy& exec = {},
                                    double eps_trunc = 1e-10);

struct RankFit {
    Estimate c_plus;
    Estimate c_minus;
    std::uint64_t k_lo = 0;
    std::uint64_t k_hi = 0;
};

/// Averages (k/N) max(Y_(k), 0)^alpha over descending ranks k in [lo_frac N, hi_frac N], and the
/// mirror image on -Y. Errors treat the order statistics as Poisson arrival times.
/// `sorted` must be ascending.
RankFit rank_fit_tail(std::span<const double> sorted, double alpha, double k_lo_frac = 0.001,
                      double k_hi_frac = 0.01);

/// Hill estimate of alpha from the top k order statistics of an ascending sample.
Estimate hill_cross_check(std::span<const double> sorted, std::uint64_t k);

/// c_plus c_inf / (c_plus + c_minus) with delta-method error.
Estimate ld_limit(const TailConstants& tc);

struct TailOptions {
    std::uint64_t goldie_samples = 1'000'000;
    std::uint64_t pool_samples = 1'000'000;
    RankWindow window;
    double eps_trunc = 1e-10;
};

struct TailStudy {
    TailConstants constants;
    std::vector<double> pool;  // ascending stationary sample
};

/// Goldie formula for c_inf, rank fit for c_plus and c_minus, and the derived limits.
TailStudy estimate_tail_constants(const SREModel& model, const KestenProfile& profile, const TailOptions& options,
                                  const RandomStream& stream, const ExecPolicy& exec = {});

}  // namespace klab
