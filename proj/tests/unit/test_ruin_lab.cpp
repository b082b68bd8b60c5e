#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "klab/error.hpp"
#include "klab/ruin_lab.hpp"

using namespace klab;
using Catch::Matchers::WithinRel;

namespace {

const SREModel kLogn15(LognormalA{-0.25, 1.0 / 3.0}, ConstB{1.0});

RuinExperiment small_experiment() {
    RuinExperiment e;
    e.mu = 1.0;
    e.u_grid = {25.0};
    e.horizon_mult = 40.0;
    e.budget = 20'000;
    e.c_plus = 10.0;
    return e;
}

bool code_is(const Error& e, ErrorCode c) { return e.code() == c; }

}  // namespace

TEST_CASE("asymptote formulas") {
    CHECK_THAT(ruin_asymptote(11.0, 1.5, 1.0, 100.0), WithinRel(11.0 * 0.1 / 0.5, 1e-12));
    CHECK_THAT(ruin_asymptote_tail(11.0, 10.0, 1e-3, 1.5, 2.0, 100.0), WithinRel(1.1 * 0.1 / 1.0, 1e-12));
    CHECK_THAT(iid_ruin_asymptote(std::pow(25.0, -2.5), 2.5, 1.0, 25.0), WithinRel(std::pow(25.0, -1.5) / 1.5, 1e-12));
    CHECK_THROWS_AS(ruin_asymptote(1.0, 1.0, 1.0, 10.0), Error);
    CHECK_THROWS_AS(ruin_asymptote_tail(1.0, 0.0, 1e-3, 1.5, 1.0, 10.0), Error);
}

TEST_CASE("hypotheses are enforced") {
    const RandomStream s(1);
    RuinExperiment e = small_experiment();
    e.budget = 10;

    const SREModel alpha_one(UniformA{2.0}, ConstB{1.0});
    CHECK_THROWS_MATCHES(estimate_ruin(alpha_one, analyze(alpha_one), e, 25.0, s), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& x) {
                             return code_is(x, ErrorCode::HypothesisViolated);
                         }));

    const SREModel signed_b(LognormalA{-0.25, 1.0 / 3.0}, NormalB{0.0, 1.0});
    CHECK_THROWS_MATCHES(estimate_ruin(signed_b, analyze(signed_b), e, 25.0, s), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& x) {
                             return code_is(x, ErrorCode::HypothesisViolated);
                         }));

    const KestenProfile p = analyze(kLogn15);
    RuinExperiment no_tail = e;
    no_tail.c_plus = 0.0;
    CHECK_THROWS_MATCHES(estimate_ruin(kLogn15, p, no_tail, 25.0, s), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& x) {
                             return code_is(x, ErrorCode::HypothesisViolated);
                         }));
}

TEST_CASE("horizon rules") {
    const RandomStream s(1);
    const KestenProfile p = analyze(kLogn15);
    RuinExperiment e = small_experiment();
    e.budget = 10;
    RuinExperiment short_h = e;
    short_h.horizon_mult = 32.0;
    // 32 * 25 = 800 steps is below the minimum horizon
    CHECK_THROWS_AS(estimate_ruin(kLogn15, p, short_h, 25.0, s), Error);
    RuinExperiment tiny = e;
    tiny.horizon_mult = 4.0;
    CHECK_THROWS_AS(estimate_ruin(kLogn15, p, tiny, 1000.0, s), Error);
    const RuinEstimate r = estimate_ruin(kLogn15, p, e, 25.0, s);
    CHECK(r.horizon == 1000);
    CHECK(r.paths == 10);
}

TEST_CASE("i.i.d. Pareto ruin is near the subexponential limit") {
    const IidLaw law{2.5, false};
    RuinExperiment e = small_experiment();
    e.budget = 40'000;
    const RuinEstimate r = estimate_ruin_iid(law, e, 25.0, RandomStream(7));
    const double pred = iid_ruin_asymptote(std::pow(25.0, -2.5), 2.5, 1.0, 25.0);
    CHECK(r.crossings_doubled >= r.crossings);
    CHECK(r.psi.value > 0.4 * pred);
    CHECK(r.psi.value < 1.5 * pred);
    CHECK_THROWS_AS(estimate_ruin_iid(IidLaw{2.5, true}, e, 25.0, RandomStream(7)), Error);
}

TEST_CASE("SRE ruin probability decreases in u at fixed horizon and in mu") {
    const KestenProfile p = analyze(kLogn15);
    RuinExperiment e = small_experiment();
    e.budget = 4'000;
    const RuinEstimate r25 = estimate_ruin(kLogn15, p, e, 25.0, RandomStream(3));
    RuinExperiment longer = e;
    longer.horizon_mult = 20.0;
    const RuinEstimate r50 = estimate_ruin(kLogn15, p, longer, 50.0, RandomStream(3));
    RuinExperiment fast = e;
    fast.mu = 2.0;
    const RuinEstimate r25_fast = estimate_ruin(kLogn15, p, fast, 25.0, RandomStream(3));
    CHECK(r25.psi.value > 0.0);
    CHECK(r25.psi.value < 1.0);
    CHECK(r50.psi.value < r25.psi.value);
    CHECK(r25_fast.psi.value < r25.psi.value);
    CHECK(r25.crossings_doubled >= r25.crossings);
}

TEST_CASE("ruin estimates do not depend on worker count") {
    const KestenProfile p = analyze(kLogn15);
    RuinExperiment e = small_experiment();
    e.budget = 3'000;
    const RuinEstimate a = estimate_ruin(kLogn15, p, e, 25.0, RandomStream(11), ExecPolicy{1, 256});
    const RuinEstimate b = estimate_ruin(kLogn15, p, e, 25.0, RandomStream(11), ExecPolicy{3, 256});
    CHECK(a.crossings == b.crossings);
    CHECK(a.crossings_doubled == b.crossings_doubled);
}

TEST_CASE("i.i.d. curve summary") {
    RuinExperiment e = small_experiment();
    e.u_grid = {25.0, 50.0};
    e.budget = 20'000;
    const RuinCurve c = ruin_curve_iid(IidLaw{2.5, false}, e, RandomStream(5));
    REQUIRE(c.rows.size() == 2);
    CHECK(c.rows[1].est.psi.value < c.rows[0].est.psi.value);
    CHECK(c.monotone);
    CHECK(c.band_lo == 0.75);
    RuinExperiment bad = e;
    bad.u_grid = {50.0, 25.0};
    CHECK_THROWS_AS(ruin_curve_iid(IidLaw{2.5, false}, bad, RandomStream(5)), Error);
}
