#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "klab/error.hpp"
#include "klab/kesten.hpp"

using namespace klab;

namespace {

const SREModel kUniform(UniformA{2.0}, ConstB{1.0});
const SREModel kLogn15(LognormalA{-0.25, 1.0 / 3.0}, ConstB{1.0});
const SREModel kLogn25(LognormalA{-0.25, 0.2}, ConstB{1.0});
const SREModel kGamma(GammaScaledA{2.0, 0.4}, ExponentialB{1.0});

}  // namespace

TEST_CASE("psi closed forms") {
    CHECK(psi(kUniform, 1.0).value == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(psi(kLogn15, 1.5).value == Catch::Approx(1.0).epsilon(1e-15));
    for (const auto* m : {&kUniform, &kLogn15, &kLogn25, &kGamma}) CHECK(psi(*m, 0.0).value == 1.0);
    CHECK(psi(kGamma, 1.0).value == Catch::Approx(0.8));
    CHECK_THROWS_AS(psi(kUniform, -0.5), Error);
}

TEST_CASE("solve_alpha matches closed-form roots") {
    CHECK(std::abs(solve_alpha(kUniform) - 1.0) <= 1e-10);
    CHECK(std::abs(solve_alpha(kLogn15) - 1.5) <= 1e-10);
    CHECK(std::abs(solve_alpha(kLogn25) - 2.5) <= 1e-10);
}

TEST_CASE("rho matches closed forms") {
    CHECK(std::abs(rho(kLogn15, 1.5).value - 0.25) <= 1e-10);
    CHECK(std::abs(rho(kLogn25, 2.5).value - 0.25) <= 1e-10);
    CHECK(std::abs(rho(kUniform, 1.0).value - (std::log(2.0) - 0.5)) <= 1e-10);
}

TEST_CASE("rho agrees with a central difference of psi") {
    const double d = 1e-4;
    for (const auto* m : {&kUniform, &kLogn15, &kLogn25, &kGamma}) {
        const double a = solve_alpha(*m);
        const double fd = (psi(*m, a + d).value - psi(*m, a - d).value) / (2 * d);
        CHECK(std::abs(rho(*m, a).value - fd) < 1e-7);
    }
}

TEST_CASE("log psi is convex between its zeros") {
    for (const auto* m : {&kUniform, &kLogn15, &kLogn25, &kGamma}) {
        const double a = solve_alpha(*m);
        CHECK(psi(*m, 0.5 * a).value < 1.0);
    }
}

TEST_CASE("solver is idempotent under a hint") {
    for (const auto* m : {&kUniform, &kLogn15, &kLogn25, &kGamma}) {
        const MomentFunction f(*m);
        const double a = solve_alpha(f);
        CHECK(std::abs(solve_alpha(f, 1e-10, a) - a) <= 1e-10);
    }
}

TEST_CASE("solver errors") {
    CHECK_THROWS_MATCHES(solve_alpha(SREModel(UniformA{std::exp(1.0)}, ConstB{1.0})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::InvalidModel;
                         }));
    CHECK_THROWS_MATCHES(solve_alpha(SREModel(ConstA{0.5}, ConstB{1.0})), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::NoRoot; }));
}

TEST_CASE("condition checks") {
    const ConditionReport u = check_conditions(kUniform, 1.0, 0.5);
    CHECK(u.neg_log_mean.status == CheckStatus::Pass);
    CHECK(u.log_mean.value == Catch::Approx(std::log(2.0) - 1.0));
    CHECK(u.all_pass());

    const ConditionReport c = check_conditions(SREModel(ConstA{0.9}, NormalB{0.0, 1.0}));
    CHECK(c.nonarithmetic.status == CheckStatus::Fail);
    CHECK(c.nondegenerate.status == CheckStatus::Pass);
    CHECK(check_conditions(SREModel(ConstA{0.9}, ConstB{1.0})).nondegenerate.status == CheckStatus::Fail);

    const SREModel heavy(LognormalA{-0.25, 1.0 / 3.0}, ParetoB{1.2, 1.0});
    CHECK(check_conditions(heavy, 1.5, 0.1).b_moment.status == CheckStatus::Fail);
    CHECK(eps_moment(heavy, 1.5) == 0.0);
    CHECK(eps_moment(SREModel(LognormalA{-0.25, 1.0 / 3.0}, ParetoB{1.8, 1.0}), 1.5) == 0.25);
}

TEST_CASE("analyze builds a profile and rejects invalid models") {
    const KestenProfile p = analyze(kLogn15);
    CHECK(p.alpha == Catch::Approx(1.5).margin(1e-10));
    CHECK(p.rho == Catch::Approx(0.25).margin(1e-10));
    CHECK(p.eps_moment == 0.5);
    CHECK(p.checks.all_pass());

    try {
        analyze(SREModel(ConstA{0.9}, NormalB{0.0, 1.0}));
        FAIL("expected InvalidModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidModel);
        CHECK(std::string(e.what()).find("nonarithmetic") != std::string::npos);
    }
    CHECK_THROWS_AS(analyze(SREModel(LognormalA{-0.25, 1.0 / 3.0}, ParetoB{1.2, 1.0})), Error);
}

TEST_CASE("Monte Carlo moment function agrees with the closed form") {
    KestenOptions o;
    o.monte_carlo = true;
    o.mc_samples = 400000;
    const KestenProfile p = analyze(kGamma, o);
    const KestenProfile q = analyze(kGamma);
    CHECK(p.psi_kind == PsiKind::MonteCarlo);
    CHECK(std::abs(p.alpha - q.alpha) < 0.05);
    CHECK(std::abs(p.rho - q.rho) < 4 * p.rho_se + 0.02);
}

TEST_CASE("burn-in steps") {
    CHECK(burn_in_beta(1.0) == 0.5);
    CHECK(burn_in_beta(1.5) == 1.0);
    CHECK(burn_in_beta(1.2) == Catch::Approx(0.85));
    const KestenProfile p = analyze(kUniform);
    CHECK(p.psi(0.5) == Catch::Approx(std::pow(2.0, 1.5) / 3.0));
    CHECK(burn_in_steps(p, 1e-12) == 470);
}

TEST_CASE("psi expansion check") {
    const KestenProfile ln = analyze(kLogn15);
    const std::vector<double> grid = default_gamma_grid(ln);
    CHECK(grid.size() == 11);
    const ExpansionReport r = psi_expansion_check(ln, grid);
    CHECK(r.bound_holds);
    CHECK(r.C == Catch::Approx(std::exp(0.05 * 0.05 / 6.0)));
    CHECK(r.slope_ok);

    const KestenProfile un = analyze(kUniform);
    const std::vector<double> g{-0.05, -0.04, -0.03, -0.02, -0.01, 0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    const ExpansionReport s = psi_expansion_check(un, g);
    CHECK(s.residual_slope >= 1.9);
    CHECK(s.residual_slope <= 2.1);
    CHECK(s.C >= 1.0);

    const std::vector<double> zero{0.0};
    CHECK(psi_expansion_check(un, zero).C == Catch::Approx(1.0));
}
