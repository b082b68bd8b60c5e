#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "klab/model.hpp"
#include "klab/stats.hpp"

namespace klab {

enum class PsiKind { ClosedForm, MonteCarlo };

/// psi(h) = E A^h and its derivative, either from closed forms or from a frozen
/// Monte Carlo sample of A (the same sample serves every h, so the MC curve is convex).
class MomentFunction {
public:
    /// Closed form for the model's A-law.
    explicit MomentFunction(const SREModel& model);
    /// Frozen-sample evaluation with `samples` draws seeded by `seed`.
    MomentFunction(const SREModel& model, std::uint64_t samples, std::uint64_t seed);

    PsiKind kind() const { return kind_; }
    /// E A^h (infinity when the moment diverges). h must be >= 0.
    Estimate value(double h) const;
    /// d/dh E A^h = E A^h log A.
    Estimate derivative(double h) const;
    /// E log A.
    Estimate log_mean() const;

private:
    SREModel model_;
    PsiKind kind_;
    std::shared_ptr<const std::vector<double>> log_a_;
};

Estimate psi(const SREModel& model, double h);
Estimate e_log_a(const SREModel& model);

/// Root of psi(h) = 1 on (0, 64] by bracketing bisection. With a hint the first
/// bracket is [hint/2, 3 hint/2]; it falls back to doubling when that is not a bracket.
double solve_alpha(const MomentFunction& psi_fn, double tol = 1e-10,
                   std::optional<double> hint = std::nullopt);
double solve_alpha(const SREModel& model, double tol = 1e-10);

/// psi'(alpha) = E A^alpha log A.
Estimate rho(const MomentFunction& psi_fn, double alpha);
Estimate rho(const SREModel& model, double alpha);

enum class CheckStatus { Pass, Fail, Unknown };
std::string to_string(CheckStatus s);

struct Check {
    CheckStatus status = CheckStatus::Unknown;
    std::string detail;
};

struct ConditionReport {
    Check neg_log_mean;
    Check nonarithmetic;
    /// Pass means the law has no deterministic fixed point x = A x + B.
    Check nondegenerate;
    Check b_moment;
    Estimate log_mean;

    bool all_pass() const;
    /// Names of the checks that did not pass.
    std::vector<std::string> failures() const;
};

/// Evaluates the hypotheses. `alpha` and `eps` are needed only for the B-moment check.
ConditionReport check_conditions(const SREModel& model, std::optional<double> alpha = std::nullopt,
                                 double eps = 0.0);

/// Largest eps in {0.5, 0.25, 0.1} with finite E A^(alpha+eps) and E|B|^(alpha+eps); 0 if none.
double eps_moment(const SREModel& model, double alpha);

struct KestenProfile {
    double alpha = 0.0;
    double rho = 0.0;
    double rho_se = 0.0;
    double eps_moment = 0.0;
    PsiKind psi_kind = PsiKind::ClosedForm;
    ConditionReport checks;
    std::shared_ptr<const MomentFunction> psi_fn;

    double psi(double h) const { return psi_fn->value(h).value; }
};

struct KestenOptions {
    double tol = 1e-10;
    bool monte_carlo = false;
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t mc_seed = 0x6b657374656eULL;
    /// Throw InvalidModel when a hypothesis fails.
    bool strict = true;
};

/// alpha, rho, eps and the hypothesis report in one pass.
KestenProfile analyze(const SREModel& model, const KestenOptions& options = {});

/// beta = alpha/2 for alpha <= 1, min(1, alpha/2 + 0.25) otherwise.
double burn_in_beta(double alpha);

/// Smallest K with psi(beta)^K <= eps_trunc.
std::uint64_t burn_in_steps(const KestenProfile& profile, double eps_trunc);

struct ExpansionReport {
    double C = 1.0;
    bool bound_holds = true;
    double residual_slope = 0.0;
    bool slope_ok = false;
};

/// Checks psi(alpha+g) <= C exp(rho g) on the grid with C the grid maximum of
/// psi(alpha+g) exp(-rho g), and that |psi(alpha+g) - 1 - rho g| scales like g^2.
ExpansionReport psi_expansion_check(const KestenProfile& profile, std::span<const double> gamma_grid);

/// Symmetric grid {0, +-0.01, ..., +-0.05}, shrunk to |g| <= eps_moment/2.
std::vector<double> default_gamma_grid(const KestenProfile& profile);

}  // namespace klab
