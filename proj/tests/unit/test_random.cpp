#include <catch2/catch_amalgamated.hpp>

#include "klab/parallel.hpp"
#include "klab/random.hpp"

using namespace klab;

TEST_CASE("streams are reproducible and distinct") {
    RandomStream s(42);
    Rng a = s.rng(3);
    Rng b = s.rng(3);
    for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());

    Rng c = s.rng(4);
    Rng d = s.child("x").rng(3);
    Rng e = RandomStream(43).rng(3);
    const double u = s.rng(3).uniform();
    CHECK(c.uniform() != u);
    CHECK(d.uniform() != u);
    CHECK(e.uniform() != u);
}

TEST_CASE("child paths depend on label and index") {
    RandomStream s(7);
    CHECK(s.child("a").path() != s.child("b").path());
    CHECK(s.child(1).path() != s.child(2).path());
    CHECK(s.child("a").child(1).path() == s.child("a").child(1).path());
}

TEST_CASE("uniform stays in the open unit interval") {
    Rng r = RandomStream(1).rng(0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000 == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("map_chunks is independent of the worker count") {
    RandomStream s(99);
    auto fn = [](Rng& rng, std::uint64_t, std::uint64_t m) {
        WeightTally t;
        for (std::uint64_t i = 0; i < m; ++i) t.add(rng.uniform() < 0.3 ? rng.exponential() : 0.0);
        return t;
    };
    const auto t1 = reduce_chunks<WeightTally>(50000, s, {1, 1000}, fn);
    const auto t4 = reduce_chunks<WeightTally>(50000, s, {4, 1000}, fn);
    CHECK(t1.paths == 50000);
    CHECK(t1.hits == t4.hits);
    CHECK(t1.sum == t4.sum);
    CHECK(t1.sum_sq == t4.sum_sq);
}

TEST_CASE("map_chunks propagates worker exceptions") {
    RandomStream s(5);
    auto fn = [](Rng&, std::uint64_t c, std::uint64_t) -> int {
        if (c == 3) throw std::runtime_error("boom");
        return 1;
    };
    CHECK_THROWS_AS(map_chunks<int>(10000, s, {3, 1000}, fn), std::runtime_error);
}

TEST_CASE("weight tally statistics") {
    WeightTally t;
    t.add(1.0);
    t.add(0.0);
    t.add(1.0);
    t.add(0.0);
    CHECK(t.mean() == 0.5);
    CHECK(t.hits == 2);
    CHECK(t.effective_size() == Catch::Approx(2.0));
    CHECK(t.stderr_of_mean() == Catch::Approx(std::sqrt(1.0 / 3.0 / 4.0)));
}
