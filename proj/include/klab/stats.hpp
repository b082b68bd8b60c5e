#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace klab {

/// A point estimate with its standard error (0 for exact values).
struct Estimate {
    double value = 0.0;
    double se = 0.0;

    double lower(double k) const { return value - k * se; }
    double upper(double k) const { return value + k * se; }
};

Estimate mean_estimate(std::span<const double> xs);

/// Ratio a/b with first-order (delta method) error, treating a and b as independent.
Estimate ratio_estimate(const Estimate& num, const Estimate& den);

/// |a - b| <= k * sqrt(se_a^2 + se_b^2)
bool agree_within(const Estimate& a, const Estimate& b, double k);

/// True when the k-stderr intervals of all estimates share a common point.
bool common_constant(std::span<const Estimate> xs, double k);

/// True when [value - k se, value + k se] intersects [lo, hi].
bool interval_intersects(const Estimate& e, double k, double lo, double hi);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test (asymptotic p-value). Inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
};

/// Least squares line; weighted when `weights` is non-empty.
LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights = {});

double median(std::vector<double> xs);

}  // namespace klab
