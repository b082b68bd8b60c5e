#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "klab/error.hpp"
#include "klab/ld_blocks.hpp"
#include "klab/ld_lab.hpp"

using namespace klab;

namespace {

const SREModel kLogn15(LognormalA{-0.25, 1.0 / 3.0}, ConstB{1.0});

bool scheme_invalid(const Error& e) { return e.code() == ErrorCode::SchemeInvalid; }

}  // namespace

TEST_CASE("scheme indices at x = 1e4") {
    const KestenProfile p = analyze(kLogn15);
    const BlockScheme s = block_scheme(p, kLogn15, 1e4, 400);
    CHECK(s.n0 == 36);
    CHECK(s.m == 3);
    CHECK(s.n1 == 33);
    CHECK(s.n2 == 39);
}

TEST_CASE("scheme at the lower edge of the n = 200 region") {
    const KestenProfile p = analyze(kLogn15);
    const double x = build_region(p, 200).x_lo;
    const BlockScheme s = block_scheme(p, kLogn15, x, 200);
    CHECK(s.n0 == 28);
    CHECK(s.m == 3);
    CHECK(s.n1 == 25);
    CHECK(s.n2 == 31);
    // E A = exp(-1/12): smallest D with D / 12 > 0.5
    CHECK(s.D == 7);
    CHECK(s.n3 == 51);
    CHECK(s.p1 == 7);
    CHECK(s.p == 6);
    CHECK(s.p3 == 5);
    CHECK(s.p1 * s.n1 <= 200 - s.n1 + 1);
    CHECK((s.p1 + 1) * s.n1 > 200 - s.n1 + 1);
}

TEST_CASE("D for the alpha <= 1 class uses psi(beta)") {
    SREModel u(UniformA{2.0}, ConstB{1.0});
    const KestenProfile p = analyze(u);
    const BlockScheme s = block_scheme(p, u, 1e6, 1000);
    const double rate = -std::log(std::pow(2.0, 1.5) / 3.0);
    CHECK(s.beta == 0.5);
    CHECK(static_cast<double>(s.D) * rate > 0.5);
    CHECK(static_cast<double>(s.D - 1) * rate <= 0.5);
}

TEST_CASE("degenerate x is refused") {
    // log x = 1 leaves n0 = floor(1 / rho) <= m = 1 once rho > 1/2
    const SREModel fast(LognormalA{-1.0, 1.0}, ConstB{1.0});
    const KestenProfile p = analyze(fast);
    CHECK(p.rho == Catch::Approx(1.0));
    CHECK_THROWS_MATCHES(block_scheme(p, fast, std::exp(1.0), 200), Error,
                         Catch::Matchers::Predicate<Error>(scheme_invalid));
    CHECK_THROWS_MATCHES(block_scheme(p, fast, 1.0, 200), Error, Catch::Matchers::Predicate<Error>(scheme_invalid));
    // with rho = 0.25 the same x still yields a positive n1
    const KestenProfile slow = analyze(kLogn15);
    CHECK(block_scheme(slow, kLogn15, std::exp(1.0), 200).n1 > 0);
}

TEST_CASE("block pieces reconstruct the full term exactly") {
    const KestenProfile p = analyze(kLogn15);
    const BlockScheme s = block_scheme(p, kLogn15, 1340.0, 200);
    Rng r = RandomStream(1).rng(0);
    std::vector<double> a(201), b(201);
    for (int rep = 0; rep < 50; ++rep) {
        // dyadic coefficients keep every partial sum exact
        for (std::size_t k = 1; k <= 200; ++k) {
            a[k] = r.uniform() < 0.5 ? 1.0 : (r.uniform() < 0.5 ? 0.5 : 2.0);
            b[k] = static_cast<double>(r.below(7)) - 3.0;
        }
        for (std::uint64_t i = 1; i <= 200; ++i) {
            const BlockTerms t = block_terms(a, b, i, s);
            REQUIRE(t.x_tilde + t.s_tilde + t.z_tilde == t.u_tilde);
        }
    }
}

TEST_CASE("every lag lands in exactly one piece") {
    const KestenProfile p = analyze(kLogn15);
    const BlockScheme s = block_scheme(p, kLogn15, 1340.0, 200);
    const std::vector<double> ones(201, 1.0);
    for (std::uint64_t i : {1u, 100u, 149u, 160u, 190u, 200u}) {
        const BlockTerms t = block_terms(ones, ones, i, s);
        const double T = static_cast<double>(std::min<std::int64_t>(s.n3, 200 - static_cast<std::int64_t>(i)));
        CHECK(t.u_tilde == T + 1.0);
        CHECK(t.x_tilde == std::min(T + 1.0, static_cast<double>(s.n1)));
        CHECK(t.s_tilde == std::max(0.0, std::min(T, static_cast<double>(s.n2)) - static_cast<double>(s.n1) + 1.0));
    }
}

TEST_CASE("diagnostics on the B = 1 chain") {
    const KestenProfile p = analyze(kLogn15);
    TailOptions to;
    to.goldie_samples = 20000;
    to.pool_samples = 400000;
    const TailStudy st = estimate_tail_constants(kLogn15, p, to, RandomStream(2), {1, 8192});
    const BlockScheme s = block_scheme(p, kLogn15, 1340.0, 200);
    BlockOptions o;
    o.budget = 100000;
    o.eta_samples = 50000;
    o.shadow_points = 2;
    const BlockDiagnostics d = block_diagnostics(kLogn15, p, st.constants, st.pool, s, o, RandomStream(3));
    REQUIRE(d.ks.size() == 3);
    CHECK(d.ks[2] == 25);
    CHECK(d.eta_consistent);
    CHECK(d.s_ratio.value > 0.0);
    CHECK(d.shadow.size() == 2);
    CHECK(d.y0_score.value > 0.0);
}
