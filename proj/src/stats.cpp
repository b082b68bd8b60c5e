#include "klab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klab/error.hpp"

namespace klab {

Estimate mean_estimate(std::span<const double> xs) {
    if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "mean of empty sample");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate ratio_estimate(const Estimate& num, const Estimate& den) {
    if (den.value == 0.0) throw Error(ErrorCode::DomainError, "ratio with zero denominator");
    const double r = num.value / den.value;
    const double rel_den = den.se / den.value;
    if (num.value == 0.0) return {0.0, std::abs(num.se / den.value)};
    const double rel_num = num.se / num.value;
    return {r, std::abs(r) * std::sqrt(rel_num * rel_num + rel_den * rel_den)};
}

bool agree_within(const Estimate& a, const Estimate& b, double k) {
    return std::abs(a.value - b.value) <= k * std::hypot(a.se, b.se);
}

bool common_constant(std::span<const Estimate> xs, double k) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& e : xs) {
        lo = std::max(lo, e.lower(k));
        hi = std::min(hi, e.upper(k));
    }
    return lo <= hi;
}

bool interval_intersects(const Estimate& e, double k, double lo, double hi) {
    return e.upper(k) >= lo && e.lower(k) <= hi;
}

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "KS test on empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    // Stephens' small-sample correction
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    return {d, kolmogorov_survival(lambda)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || (!weights.empty() && weights.size() != n))
        throw Error(ErrorCode::InvalidArgument, "fit_line needs matching inputs of size >= 2");
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sxx += w * (x[i] - mx) * (x[i] - mx);
        sxy += w * (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw Error(ErrorCode::InvalidArgument, "fit_line with constant abscissa");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (weights.empty()) {
        if (n > 2) {
            double rss = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = y[i] - fit.intercept - fit.slope * x[i];
                rss += r * r;
            }
            fit.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
        }
    } else {
        // inverse-variance weights: Var(slope) = 1 / sxx
        fit.slope_se = std::sqrt(1.0 / sxx);
    }
    return fit;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace klab
