#pragma once

#include <optional>
#include <string>
#include <variant>

#include "klab/random.hpp"

namespace klab {

// Laws for the multiplier A (strictly positive).
struct LognormalA {
    double mu;
    double sigma2;
};
/// Uniform(0, hi)
struct UniformA {
    double hi;
};
/// Gamma with shape k and scale theta
struct GammaScaledA {
    double shape;
    double scale;
};
/// Point mass; admitted for hand-checkable tests only (log A is arithmetic).
struct ConstA {
    double value;
};
using ALaw = std::variant<LognormalA, UniformA, GammaScaledA, ConstA>;

// Laws for the additive term B.
struct ConstB {
    double value;
};
struct NormalB {
    double mu;
    double sigma2;
};
/// P(B > t) = (scale / t)^index for t >= scale
struct ParetoB {
    double index;
    double scale;
};
struct ExponentialB {
    double rate;
};
using BLaw = std::variant<ConstB, NormalB, ParetoB, ExponentialB>;

struct Pair {
    double a;
    double b;
};

/// Joint law of (A, B) for Y_n = A_n Y_{n-1} + B_n with A independent of B inside a
/// pair and pairs i.i.d. over time. Immutable once built.
///
/// `b_sign = -1` mirrors B; that is how left-tail questions are posed.
class SREModel {
public:
    SREModel(ALaw a, BLaw b, double b_sign = 1.0);

    const ALaw& a_law() const { return a_; }
    const BLaw& b_law() const { return b_; }
    double b_sign() const { return b_sign_; }

    bool constant_a() const { return std::holds_alternative<ConstA>(a_); }
    bool constant_b() const { return std::holds_alternative<ConstB>(b_); }

    /// Same A-law with B replaced.
    SREModel with_b(BLaw b) const { return SREModel(a_, std::move(b)); }
    SREModel negated_b() const { return SREModel(a_, b_, -b_sign_); }

    std::string describe() const;

private:
    ALaw a_;
    BLaw b_;
    double b_sign_;
};

double sample_a(const SREModel& model, Rng& rng);
double sample_b(const SREModel& model, Rng& rng);
Pair sample_pair(const SREModel& model, Rng& rng);

/// Draw from the h-shifted law  A^h dP / E A^h  (closed form for every catalog law).
double sample_a_tilted(const SREModel& model, double h, Rng& rng);

/// E B, or nullopt when it is infinite/undefined.
std::optional<double> b_mean(const SREModel& model);
/// Whether E|B|^h < infinity.
bool b_moment_finite(const SREModel& model, double h);
/// B >= 0 almost surely.
bool b_nonnegative(const SREModel& model);
/// B = 0 almost surely.
bool b_zero(const SREModel& model);

}  // namespace klab
