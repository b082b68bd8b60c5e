#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "klab/error.hpp"
#include "klab/tail_constants.hpp"

using namespace klab;

namespace {

std::vector<double> pareto_sample(double alpha, std::uint64_t n, std::uint64_t seed) {
    Rng r = RandomStream(seed).rng(0);
    std::vector<double> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(std::pow(r.uniform(), -1.0 / alpha));
    std::sort(v.begin(), v.end());
    return v;
}

bool has_code(const Error& e, ErrorCode c) { return e.code() == c; }

}  // namespace

TEST_CASE("Goldie constant collapses to 1/rho at alpha = 1") {
    SREModel m(UniformA{2.0}, ConstB{1.0});
    const KestenProfile p = analyze(m);
    const Estimate c = goldie_c_inf(m, p, 20000, RandomStream(1));
    CHECK(c.value == Catch::Approx(1.0 / (std::log(2.0) - 0.5)).epsilon(1e-9));
    CHECK(c.value == Catch::Approx(5.1774).margin(1e-4));
}

TEST_CASE("Goldie estimator with a one-term series") {
    // tiny A makes eta = A_1 to first order
    const KestenProfile p = analyze(SREModel(LognormalA{-0.25, 1.0 / 3.0}, ConstB{1.0}));
    SREModel tiny(ConstA{1e-6}, ConstB{1.0});
    const Estimate c = goldie_c_inf(tiny, p, 10000, RandomStream(2));
    const double a = 1e-6 + 1e-12;
    const double expected = (std::pow(1.0 + a, 1.5) - std::pow(a, 1.5)) / (1.5 * 0.25);
    CHECK(c.value == Catch::Approx(expected).epsilon(1e-9));
    CHECK_THROWS_AS(goldie_c_inf(tiny, p, 100, RandomStream(2)), Error);
}

TEST_CASE("rank fit on an exact Pareto sample") {
    const auto s = pareto_sample(1.5, 1000000, 3);
    const RankFit f = rank_fit_tail(s, 1.5);
    CHECK(std::abs(f.c_plus.value - 1.0) <= 3.0 * f.c_plus.se);
    CHECK(f.c_plus.se < 0.1);
    CHECK(f.c_minus.value == 0.0);
    CHECK(f.k_lo == 1000);
    CHECK(f.k_hi == 10000);
}

TEST_CASE("rank fit scales like s^alpha") {
    auto s = pareto_sample(1.5, 200000, 4);
    const RankFit f = rank_fit_tail(s, 1.5);
    for (double& x : s) x *= 2.0;
    const RankFit g = rank_fit_tail(s, 1.5);
    CHECK(g.c_plus.value == Catch::Approx(f.c_plus.value * std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK(g.c_plus.se == Catch::Approx(f.c_plus.se * std::pow(2.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("rank fit window errors") {
    const auto s = pareto_sample(1.5, 100000, 5);
    CHECK_THROWS_MATCHES(rank_fit_tail(s, 1.5, 0.001, 0.0015), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return has_code(e, ErrorCode::InsufficientTail);
                         }));
    CHECK_THROWS_AS(rank_fit_tail(s, 1.5, 0.01, 0.1), Error);
}

TEST_CASE("Hill estimator") {
    const auto s = pareto_sample(1.5, 1000000, 6);
    const Estimate h = hill_cross_check(s, 1000);
    CHECK(std::abs(h.value - 1.5) <= 3.0 * 1.5 / std::sqrt(1000.0));
    CHECK(h.se == Catch::Approx(h.value / std::sqrt(1000.0)));

    const std::vector<double> flat(10000, 3.0);
    CHECK_THROWS_MATCHES(hill_cross_check(flat, 200), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return has_code(e, ErrorCode::InsufficientTail);
                         }));
}

TEST_CASE("ld limit arithmetic") {
    TailConstants tc;
    tc.c_plus = {2.0, 0.0};
    tc.c_minus = {1.0, 0.0};
    tc.c_inf = {3.0, 0.0};
    CHECK(ld_limit(tc).value == Catch::Approx(2.0));

    tc.c_plus = {5.0, 0.1};
    tc.c_minus = {0.0, 0.0};
    tc.c_inf = {5.0, 0.1};
    CHECK(ld_limit(tc).value == Catch::Approx(5.0));
    CHECK(ld_limit(tc).se == Catch::Approx(0.1));

    tc.c_minus = {5.0, 0.1};
    CHECK(ld_limit(tc).value == Catch::Approx(2.5));

    tc.c_plus = {0.0, 0.0};
    tc.c_minus = {0.0, 0.0};
    CHECK_THROWS_MATCHES(ld_limit(tc), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return has_code(e, ErrorCode::DegenerateTails);
                         }));
}

TEST_CASE("B = 1 chain: tail index and window stability") {
    SREModel m(LognormalA{-0.25, 1.0 / 3.0}, ConstB{1.0});
    const KestenProfile p = analyze(m);
    const auto pool = stationary_pool(m, p, 1000000, RandomStream(7), {1, 8192});
    CHECK(std::abs(hill_cross_check(pool, 2000).value - 1.5) < 0.15);
    const RankFit shallow = rank_fit_tail(pool, 1.5, 0.005, 0.02);
    const RankFit deep = rank_fit_tail(pool, 1.5, 0.001, 0.005);
    CHECK(agree_within(shallow.c_plus, deep.c_plus, 3.0));
    CHECK(rank_fit_tail(pool, 1.5).c_minus.value == 0.0);
}

TEST_CASE("symmetric B gives balanced tails") {
    SREModel m(LognormalA{-0.25, 1.0 / 3.0}, NormalB{0.0, 1.0});
    const KestenProfile p = analyze(m);
    const auto pool = stationary_pool(m, p, 500000, RandomStream(8), {1, 8192});
    const RankFit f = rank_fit_tail(pool, 1.5);
    CHECK(f.c_minus.value > 0.0);
    CHECK(agree_within(f.c_plus, f.c_minus, 3.0));
}
