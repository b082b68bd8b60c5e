#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "klab/parallel.hpp"
#include "klab/random.hpp"

namespace klab {

/// Tail bounds for sums R_n = X_1 + ... + X_n of independent variables.
/// Every bound returns the raw formula value and the value capped at 1.

struct BoundValue {
    double raw = 0.0;
    double capped = 0.0;
};

/// Inputs shared by the inequalities.
struct MomentSummary {
    std::uint64_t n = 0;
    double var_sum = 0.0;    // B_n
    double p = 2.0;
    double m_p = 0.0;        // sum of E|X_j|^p
    double trunc_y = 1.0;    // y
    double tail_at_y = 0.0;  // sum of P(X_j > y)
    double q0 = 0.5;
    double c = 0.0;
    double q = 1.0;

    double beta() const { return p / (p + 2.0); }
    int petrov_L() const { return p == 2.0 ? 1 : 2; }
};

/// exp(-(x / 2y) asinh(x y / (2 B_n)))
BoundValue prokhorov(double x, double y, double var_sum);

/// sum P(X_j > y) + (e m_p / (x y^(p-1)))^(x/y)
BoundValue nagaev_sv(double x, double y, double p, double m_p, double tail_at_y);

/// sum P(X_j > y) + (m_p / (beta x y^(p-1)))^(beta x / y) + exp(-(1-beta)^2 x^2 / (2 e^p B_n)),
/// beta = p / (p + 2), p > 2.
BoundValue fuk_nagaev(double x, double y, double p, double m_p, double var_sum, double tail_at_y);

/// How the shift in the maximal inequality is read.
enum class PetrovReading {
    Standard,  // (L m_p / (1 - q0))^(1/p)
    Literal,   // ((1 - q0) m_p / L)^(1/p)
};

std::string to_string(PetrovReading r);

/// L = 1 for p = 2, L = 2 for p in (1, 2).
int petrov_L(double p);
double petrov_shift(double q0, double p, double m_p, PetrovReading reading = PetrovReading::Standard);

/// Bound on P(max_{i<=n} R_i > x): tail_fn(x - shift) / q0.
BoundValue petrov_max(double x, double q0, double p, double m_p, const std::function<double(double)>& tail_fn,
                      PetrovReading reading = PetrovReading::Standard);

/// Bound on P(max_{i<=n} R_i > x): tail_value / q, where tail_value = P(R_n > x - c)
/// and P(R_n - R_k >= -c) >= q for all k.
BoundValue levy_ottaviani(double x, double c, double q, double tail_value);

// ---------------------------------------------------------------------------
// Empirical dominance checks

enum class SummandKind {
    Uniform,              // U(-1, 1)
    Rademacher,           // +-1
    Normal,               // N(0, 1)
    CenteredExponential,  // Exp(1) - 1
    CenteredPareto,       // Pareto(a) on [1, inf) minus its mean, a > 1
    SymmetricPareto,      // random sign times Pareto(a)
};

struct SummandLaw {
    SummandKind kind = SummandKind::Uniform;
    double a = 0.0;

    std::string describe() const;
};

double summand_sample(const SummandLaw& law, Rng& rng);
/// E|X|^p; infinite when the moment does not exist.
double summand_abs_moment(const SummandLaw& law, double p);
double summand_variance(const SummandLaw& law);
/// P(X > y)
double summand_tail(const SummandLaw& law, double y);
/// sup |X|, infinite for unbounded laws.
double summand_bound(const SummandLaw& law);
/// Exact P(R_n > t) when available.
std::optional<std::function<double(double)>> exact_sum_tail(const SummandLaw& law, std::uint64_t n);

enum class BoundId { Prokhorov, NagaevSV, FukNagaev, Petrov, LevyOttaviani };

std::string to_string(BoundId b);

struct SuiteCase {
    std::string name;
    BoundId bound = BoundId::Prokhorov;
    SummandLaw law;
    std::uint64_t n = 100;
    double x = 0.0;
    double y = 0.0;   // truncation level, when used
    double p = 2.0;   // moment order, when used
    double q0 = 0.5;  // Petrov
    double c = 0.0;   // Levy-Ottaviani
};

/// Fifteen cases covering all five inequalities.
std::vector<SuiteCase> default_suite();

struct DominanceRow {
    SuiteCase config;
    std::string params;
    BoundValue bound;
    double empirical = 0.0;
    double empirical_se = 0.0;
    bool pass = false;
};

struct DominanceReport {
    std::vector<DominanceRow> rows;
    std::uint64_t trials = 0;
    PetrovReading reading = PetrovReading::Standard;
    bool all_pass = false;

    std::vector<const DominanceRow*> failures() const;
};

/// For each case (optionally only those for `only`), simulates `trials` sums and checks
/// empirical + 3 stderr <= bound. Hypotheses of each inequality are checked and
/// reported as failures when they do not hold.
DominanceReport verify_dominance(const std::vector<SuiteCase>& suite, std::optional<BoundId> only,
                                 std::uint64_t trials, const RandomStream& stream, const ExecPolicy& exec = {},
                                 PetrovReading reading = PetrovReading::Standard);

}  // namespace klab
