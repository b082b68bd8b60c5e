#pragma once

#include <cstdint>
#include <vector>

#include "klab/kesten.hpp"
#include "klab/ld_lab.hpp"
#include "klab/model.hpp"
#include "klab/parallel.hpp"
#include "klab/stats.hpp"
#include "klab/tail_constants.hpp"

namespace klab {

struct RuinExperiment {
    double mu = 1.0;
    std::vector<double> u_grid;
    /// Walks run for n <= ceil(horizon_mult * u) steps.
    double horizon_mult = 32.0;
    std::uint64_t budget = 1'000'000;
    /// Right tail constant; must be positive.
    double c_plus = 0.0;
    /// Smallest admissible horizon.
    std::uint64_t min_horizon = 1000;
    double eps_trunc = 1e-10;
};

struct RuinEstimate {
    double u = 0.0;
    std::uint64_t horizon = 0;
    std::uint64_t paths = 0;
    std::uint64_t crossings = 0;
    Estimate psi;
    /// Same paths run to twice the horizon.
    std::uint64_t crossings_doubled = 0;
    Estimate psi_doubled;
};

/// Fraction of stationary-start paths whose centred walk sum_k (Y_k - E Y - mu) exceeds u
/// within ceil(horizon_mult * u) steps. Paths stop at their first crossing.
RuinEstimate estimate_ruin(const SREModel& model, const KestenProfile& profile, const RuinExperiment& exp, double u,
                           const RandomStream& stream, const ExecPolicy& exec = {});

/// Same walk for i.i.d. Pareto steps (one-sided law only).
RuinEstimate estimate_ruin_iid(const IidLaw& law, const RuinExperiment& exp, double u, const RandomStream& stream,
                               const ExecPolicy& exec = {});

/// c_inf u^(1 - alpha) / (mu (alpha - 1))
double ruin_asymptote(double c_inf, double alpha, double mu, double u);
/// (c_inf / c_plus) u P(Y > u) / (mu (alpha - 1))
double ruin_asymptote_tail(double c_inf, double c_plus, double tail_prob, double alpha, double mu, double u);
/// u P(X > u) / (mu (alpha - 1)), the i.i.d. limit.
double iid_ruin_asymptote(double tail_prob, double alpha, double mu, double u);

struct RuinRow {
    RuinEstimate est;
    double mu = 0.0;
    double predicted = 0.0;
    Estimate normalized;
    bool in_band = false;
    bool horizon_stable = false;
};

struct RuinCurve {
    std::vector<RuinRow> rows;
    double band_lo = 0.6;
    double band_hi = 1.5;
    bool all_in_band = false;
    double slope = 0.0;
    double slope_se = 0.0;
    bool slope_ok = false;
    bool monotone = false;
    bool horizon_stable = false;
    bool pass = false;
};

/// psi_hat(u) u^(alpha-1) mu (alpha-1) / c_inf along the grid.
RuinCurve ruin_curve(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                     const RuinExperiment& exp, const RandomStream& stream, const ExecPolicy& exec = {});

/// psi_hat(u) against the i.i.d. limit; the band is [0.75, 1.25].
RuinCurve ruin_curve_iid(const IidLaw& law, const RuinExperiment& exp, const RandomStream& stream,
                         const ExecPolicy& exec = {});

}  // namespace klab
