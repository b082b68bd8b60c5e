#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "klab/kesten.hpp"
#include "klab/model.hpp"
#include "klab/parallel.hpp"
#include "klab/stats.hpp"
#include "klab/tail_constants.hpp"

namespace klab {

enum class AlphaClass { Low, High };
enum class Estimator { Crude, Tilted };
std::string to_string(AlphaClass c);
std::string to_string(Estimator e);

struct RegionParams {
    /// Exponent of log n in the lower bound when alpha <= 2; must exceed 2.
    double M = 2.2;
    /// c_n for alpha > 2; non-positive selects log log n.
    double c_n = 0.0;
    /// s_n = min(n^s_exponent, n / log n, s_cap).
    double s_exponent = 0.9;
    double s_cap = 700.0;
};

struct LDRegion {
    AlphaClass alpha_class = AlphaClass::Low;
    double M = 0.0;
    double c_n = 0.0;
    double s_n = 0.0;
    std::uint64_t n = 0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

/// Lower bound n^(1/alpha) (log n)^M for alpha <= 2, c_n sqrt(n) log n for alpha > 2;
/// upper bound e^(s_n).
LDRegion build_region(const KestenProfile& profile, std::uint64_t n, const RegionParams& params = {});

/// `count` log-spaced points in [lo, hi] (a single point when lo == hi).
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Grid inside the region capped at min(x_hi, x_lo * span).
std::vector<double> x_grid(const LDRegion& region, std::size_t count = 8, double span = 100.0);

/// Largest x with predicted probability scale * x^-alpha >= max(1e-7, 100 / budget).
double crude_reach(double scale, double alpha, std::uint64_t budget);

/// d_n = 0 for alpha <= 1, n E B / (1 - E A) otherwise.
Estimate centering(const SREModel& model, const KestenProfile& profile, std::uint64_t n);

struct LDProbability {
    double x = 0.0;
    Estimate p;
    double n_eff = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t paths = 0;
    Estimator estimator = Estimator::Crude;
};

struct LDSimOptions {
    double eps_trunc = 1e-10;
    /// Tilted runs with fewer effective hits raise DegenerateWeights.
    double min_ess = 100.0;
    /// Share of tilted-run paths drawn without any tilt; bounds every weight by 1 / share.
    double defensive = 0.25;
    /// Tilt windows may start up to lookback * L steps before the first summand.
    double lookback = 2.0;
    /// Window lengths as multiples of floor(log x / rho), mixed with equal weight.
    std::vector<double> window_factors{0.5, 0.75, 1.0, 1.5, 2.0};
};

/// P(S_n - d_n > x) from paths started at a stationary Y_0 (burn-in from 0). The tilted
/// estimator draws one uniformly placed window of consecutive A's from A^alpha dP / psi(alpha),
/// its length a random multiple of floor(log x / rho) (or, with probability options.defensive,
/// no window), and weights hits by the exact mixture likelihood ratio.
LDProbability estimate_ld_probability(const SREModel& model, const KestenProfile& profile, std::uint64_t n, double x,
                                      double d_n, Estimator estimator, std::uint64_t budget,
                                      const RandomStream& stream, const ExecPolicy& exec = {},
                                      const LDSimOptions& options = {});

/// Crude estimates at every x from one shared set of paths.
std::vector<LDProbability> estimate_ld_probabilities_crude(const SREModel& model, const KestenProfile& profile,
                                                           std::uint64_t n, std::span<const double> xs, double d_n,
                                                           std::uint64_t budget, const RandomStream& stream,
                                                           const ExecPolicy& exec = {},
                                                           const LDSimOptions& options = {});

struct Denominator {
    Estimate value;  // n P(|Y| > x)
    bool fitted = false;
};

/// n P(|Y| > x) from an ascending stationary pool; with fewer than `min_exceed` pool points
/// beyond x it switches to n (c_plus + c_minus) x^-alpha and tags the result.
Denominator estimate_denominator(std::span<const double> pool, const TailConstants& tc, double alpha,
                                 std::uint64_t n, double x, std::uint64_t min_exceed = 100);

/// Fitted form only.
Denominator fitted_denominator(const TailConstants& tc, double alpha, std::uint64_t n, double x);

struct RatioEstimate {
    std::uint64_t n = 0;
    double x = 0.0;
    Estimator estimator = Estimator::Crude;
    Estimate p;
    Denominator denom;
    Estimate ratio;
    double n_eff = 0.0;
    bool in_band = false;
};

struct VerdictRule {
    double band_lo = 0.6;
    double band_hi = 1.4;
    double min_fraction = 0.8;
    double k = 3.0;
};

struct RatioCurve {
    std::vector<RatioEstimate> points;
    Estimate target;
    VerdictRule rule;
    double fraction_in_band = 0.0;
    bool flat = false;
    double median_abs_dev = 0.0;
    bool pass = false;
};

/// Fills in band membership and the curve summaries for a list of ratios.
RatioCurve summarize_curve(std::vector<RatioEstimate> points, const Estimate& target, const VerdictRule& rule);

/// Ratio P(S_n - d_n > x) / (n P(|Y| > x)) along the grid against tc.ld_limit.
RatioCurve ld_ratio_curve(const SREModel& model, const KestenProfile& profile, const TailConstants& tc,
                          std::span<const double> pool, std::uint64_t n, std::span<const double> grid,
                          Estimator estimator, std::uint64_t budget, const RandomStream& stream,
                          const ExecPolicy& exec = {}, const VerdictRule& rule = {},
                          const LDSimOptions& options = {});

/// Pareto summands: P(|X| > t) = t^-alpha for t >= 1, one-sided or with a fair random sign.
struct IidLaw {
    double alpha = 1.5;
    bool symmetric = false;
};

double iid_tail_balance(const IidLaw& law);
/// b_n = sqrt(a n log n), a = alpha - 1.5, when alpha > 2; n^(delta + 1/alpha) otherwise.
double iid_region_start(const IidLaw& law, std::uint64_t n, double delta = 0.1);

/// Crude ratio curve P(S_n - E S_n > x) / (n P(|X| > x)) against the tail balance p.
RatioCurve nagaev_baseline(const IidLaw& law, std::uint64_t n, std::span<const double> grid, std::uint64_t budget,
                           const RandomStream& stream, const ExecPolicy& exec = {}, const VerdictRule& rule = {});

/// Grid from b_n to the crude reach of the budget.
std::vector<double> nagaev_grid(const IidLaw& law, std::uint64_t n, std::uint64_t budget, std::size_t count = 8,
                                double delta = 0.1);

}  // namespace klab
