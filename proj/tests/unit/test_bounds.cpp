#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klab/bounds.hpp"
#include "klab/error.hpp"

using namespace klab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("prokhorov values") {
    CHECK_THAT(prokhorov(2.0, 1.0, 1.0).raw, WithinAbs(std::sqrt(2.0) - 1.0, 1e-12));
    CHECK(prokhorov(50.0, 1.0, 1e-3).capped <= 1.0);
    CHECK_THAT(prokhorov(1.0, 1.0, 1e12).raw, WithinAbs(1.0, 1e-9));
    CHECK_THROWS_AS(prokhorov(0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(prokhorov(1.0, -1.0, 1.0), Error);
    CHECK_THROWS_AS(prokhorov(1.0, 1.0, 0.0), Error);
}

TEST_CASE("nagaev values") {
    CHECK_THAT(nagaev_sv(10.0, 2.0, 2.0, 5.0, 0.01).raw, WithinAbs(0.01 + std::pow(std::exp(1.0) * 5.0 / 20.0, 5.0), 1e-12));
    CHECK_THAT(nagaev_sv(10.0, 2.0, 2.0, 5.0, 0.01).raw, WithinAbs(0.15493, 5e-5));
    CHECK_THAT(nagaev_sv(3.0, 3.0, 2.0, 1.0, 0.2).raw, WithinRel(0.2 + std::exp(1.0) / 9.0, 1e-12));
    CHECK(nagaev_sv(4.0, 1.0, 2.0, 0.0, 0.05).raw == 0.05);
    CHECK(nagaev_sv(1.0, 1.0, 2.0, 100.0, 0.0).capped == 1.0);
    CHECK_THROWS_AS(nagaev_sv(1.0, 1.0, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("fuk-nagaev values") {
    const BoundValue b = fuk_nagaev(20.0, 4.0, 3.0, 10.0, 8.0, 0.0);
    CHECK_THAT(b.raw, WithinAbs(0.8195, 1e-4));
    const double gauss = std::exp(-0.16 * 400.0 / (2.0 * std::exp(3.0) * 8.0));
    CHECK(b.raw >= gauss);
    CHECK_THAT(fuk_nagaev(20.0, 4.0, 3.0, 10.0, 1e-12, 0.0).raw, WithinAbs(std::pow(10.0 / 192.0, 3.0), 1e-12));
    CHECK_THROWS_AS(fuk_nagaev(20.0, 4.0, 2.0, 10.0, 8.0, 0.0), Error);
    CHECK_THAT(MomentSummary{.p = 3.0}.beta(), WithinAbs(0.6, 1e-15));
}

TEST_CASE("petrov shift and bound") {
    CHECK(petrov_L(2.0) == 1);
    CHECK(petrov_L(1.5) == 2);
    CHECK_THROWS_AS(petrov_L(2.5), Error);
    CHECK_THAT(petrov_shift(0.5, 2.0, 4.0, PetrovReading::Literal), WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK_THAT(petrov_shift(0.5, 2.0, 4.0, PetrovReading::Standard), WithinAbs(std::sqrt(8.0), 1e-12));
    auto tail = [](double t) { return t <= 0.0 ? 1.0 : std::exp(-t); };
    CHECK_THAT(petrov_max(3.0, 0.8, 2.0, 0.0, tail).raw, WithinRel(std::exp(-3.0) / 0.8, 1e-12));
    CHECK(petrov_max(1.0, 0.5, 2.0, 4.0, tail).capped == 1.0);
    CHECK_THROWS_AS(petrov_max(1.0, 1.0, 2.0, 1.0, tail), Error);
}

TEST_CASE("levy-ottaviani values") {
    CHECK(levy_ottaviani(5.0, 0.0, 1.0, 0.2).raw == 0.2);
    CHECK_THAT(levy_ottaviani(5.0, 1.0, 0.5, 0.2).raw, WithinAbs(0.4, 1e-15));
    CHECK_THAT(levy_ottaviani(5.0, 1.0, 0.4, 0.3).raw, WithinAbs(0.75, 1e-15));
    CHECK(levy_ottaviani(5.0, 1.0, 0.1, 0.3).capped == 1.0);
    CHECK_THROWS_AS(levy_ottaviani(5.0, 1.0, 0.0, 0.3), Error);
    CHECK_THROWS_AS(levy_ottaviani(5.0, 1.0, 1.5, 0.3), Error);
}

TEST_CASE("bounds are monotone in x and capped") {
    auto tail = [](double t) { return t <= 0.0 ? 1.0 : std::exp(-t / 10.0); };
    double prev[5] = {2, 2, 2, 2, 2};
    for (double x = 1.0; x <= 200.0; x *= 1.3) {
        const double v[5] = {prokhorov(x, 1.0, 30.0).capped, nagaev_sv(x, x / 2.0, 1.5, 50.0, 0.01).capped,
                             fuk_nagaev(x, x / 3.0, 3.0, 50.0, 30.0, 0.01).capped, petrov_max(x, 0.5, 2.0, 30.0, tail).capped,
                             levy_ottaviani(x, 2.0, 0.6, tail(x - 2.0)).capped};
        for (int i = 0; i < 5; ++i) {
            CHECK(v[i] >= 0.0);
            CHECK(v[i] <= 1.0);
            CHECK(v[i] <= prev[i] + 1e-15);
            prev[i] = v[i];
        }
    }
}

TEST_CASE("summand laws") {
    const SummandLaw exp1{SummandKind::CenteredExponential};
    CHECK_THAT(summand_abs_moment(exp1, 2.0), WithinRel(1.0, 1e-9));
    CHECK_THAT(summand_abs_moment({SummandKind::Normal}, 2.0), WithinRel(1.0, 1e-12));
    CHECK_THAT(summand_abs_moment({SummandKind::Normal}, 4.0), WithinRel(3.0, 1e-12));
    const SummandLaw par{SummandKind::CenteredPareto, 3.0};
    CHECK_THAT(summand_abs_moment(par, 2.0), WithinRel(summand_variance(par), 1e-8));
    CHECK(std::isinf(summand_abs_moment({SummandKind::CenteredPareto, 1.5}, 1.5)));
    CHECK_THAT(summand_tail({SummandKind::SymmetricPareto, 3.0}, 2.0), WithinRel(0.0625, 1e-12));

    Rng rng = RandomStream(3).rng(0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = summand_sample(par, rng);
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.02);

    const auto rt = exact_sum_tail({SummandKind::Rademacher}, 4);
    REQUIRE(rt);
    CHECK_THAT((*rt)(1.0), WithinAbs(5.0 / 16.0, 1e-12));  // R_4 in {2, 4}
    CHECK_THAT((*rt)(-10.0), WithinAbs(1.0, 1e-12));
    CHECK(!exact_sum_tail(exp1, 4));
}

TEST_CASE("dominance suite") {
    const auto suite = default_suite();
    CHECK(suite.size() >= 12);
    const DominanceReport rep = verify_dominance(suite, std::nullopt, 20'000, RandomStream(1));
    CHECK(rep.rows.size() == suite.size());
    for (const auto& r : rep.rows) {
        INFO(r.config.name << " " << r.params << " emp " << r.empirical << " bound " << r.bound.capped);
        CHECK(r.pass);
    }
    CHECK(rep.all_pass);
    const DominanceReport only = verify_dominance(suite, BoundId::LevyOttaviani, 2'000, RandomStream(1));
    CHECK(only.rows.size() == 2);
}

TEST_CASE("literal petrov reading is violated") {
    SuiteCase c;
    c.name = "petrov_exp";
    c.bound = BoundId::Petrov;
    c.law = {SummandKind::CenteredExponential};
    c.n = 100;
    c.x = 5.0;
    c.p = 2.0;
    c.q0 = 0.9;
    const auto lit = verify_dominance({c}, std::nullopt, 20'000, RandomStream(2), {}, PetrovReading::Literal);
    CHECK_FALSE(lit.all_pass);
    CHECK(lit.failures().size() == 1);
    const auto std_ = verify_dominance({c}, std::nullopt, 20'000, RandomStream(2));
    CHECK(std_.all_pass);
}

TEST_CASE("hypothesis violations are reported") {
    SuiteCase c;
    c.name = "prokhorov_unbounded";
    c.bound = BoundId::Prokhorov;
    c.law = {SummandKind::Normal};
    c.n = 10;
    c.x = 5.0;
    c.y = 1.0;
    const auto rep = verify_dominance({c}, std::nullopt, 1'000, RandomStream(2));
    CHECK_FALSE(rep.rows[0].pass);
    CHECK(rep.rows[0].params.find("hypotheses=violated") != std::string::npos);
}
