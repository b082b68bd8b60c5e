#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "klab/config.hpp"
#include "klab/error.hpp"

using namespace klab;
using Catch::Matchers::ContainsSubstring;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_config(ConfigFile::parse(text, "t.cfg")); }

std::string error_of(const std::string& text) {
    try {
        validate_config(parse(text));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("flat and sectioned keys") {
    const auto c = parse(R"(
task = "ruin"   # trailing comment
seed = 17
model.a_law = lognormal
model.a_mu = -0.25
[model]
a_sigma2 = 0.2
[ruin]
u_grid = [25, 50, 100]
iid = true
)");
    CHECK(c.task == "ruin");
    CHECK(c.seed == 17);
    CHECK(c.model.a_mu == -0.25);
    CHECK(c.model.a_sigma2 == 0.2);
    CHECK(c.ruin.u_grid == std::vector<double>{25, 50, 100});
    CHECK(c.ruin.iid);
    REQUIRE(c.echo.size() == 7);
    CHECK(c.echo[5].first == "ruin.u_grid");
}

TEST_CASE("line diagnostics") {
    CHECK_THROWS_WITH(parse("seed = 1\nmodel.nope = 2\n"), ContainsSubstring("t.cfg:2") && ContainsSubstring("model.nope"));
    CHECK_THROWS_WITH(parse("seed = abc\n"), ContainsSubstring("t.cfg:1") && ContainsSubstring("number"));
    CHECK_THROWS_WITH(parse("seed = -1\n"), ContainsSubstring("non-negative integer"));
    CHECK_THROWS_WITH(parse("seed = 1\nseed = 2\n"), ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(parse("just words\n"), ContainsSubstring("key = value"));
    CHECK_THROWS_WITH(parse("model.a_law = \"open\n"), ContainsSubstring("unterminated"));
    CHECK_THROWS_WITH(parse("ruin.iid = maybe\n"), ContainsSubstring("true or false"));
    CHECK_THROWS_WITH(parse("ruin.u_grid = [1, x]\n"), ContainsSubstring("number"));
    CHECK_THROWS_WITH(parse("task = fly\n"), ContainsSubstring("unknown task"));
}

TEST_CASE("task preconditions") {
    CHECK(error_of("task = solve\n").empty());
    CHECK_THAT(error_of("task = ld-ratio\nld.M = 2\n"), ContainsSubstring("ld.M"));
    CHECK_THAT(error_of("task = ld-ratio\nld.estimator = magic\n"), ContainsSubstring("ld.estimator"));
    CHECK_THAT(error_of("task = blocks\nblocks.sigma = 0.3\n"), ContainsSubstring("blocks.sigma"));
    CHECK_THAT(error_of("task = ruin\nruin.horizon = 4\n"), ContainsSubstring("ruin.horizon"));
    CHECK_THAT(error_of("task = ruin\nruin.u_grid = 50, 25\n"), ContainsSubstring("increasing"));
    CHECK_THAT(error_of("task = bounds\nbounds.reading = sideways\n"), ContainsSubstring("bounds.reading"));
    CHECK_THAT(error_of("task = bounds\nbounds.only = chebyshev\n"), ContainsSubstring("bounds.only"));
    CHECK_THAT(error_of("task = constants\nconstants.pool_samples = 10\n"), ContainsSubstring("pool_samples"));
    CHECK_THAT(error_of("task = solve\noutput.format = xml\n"), ContainsSubstring("output.format"));
    // parameters of other tasks are not checked
    CHECK(error_of("task = solve\nruin.horizon = 4\n").empty());
}

TEST_CASE("model parameters") {
    auto c = parse("model.a_law = gamma\nmodel.a_shape = 2\nmodel.a_scale = 0.3\nmodel.b_law = exponential\n");
    const SREModel m = c.model.build();
    CHECK(std::holds_alternative<GammaScaledA>(m.a_law()));
    CHECK(std::holds_alternative<ExponentialB>(m.b_law()));
    c.model.a_law = "weird";
    CHECK_THROWS_AS(c.model.build(), Error);
    CHECK(task_names().size() == 8);
    CHECK(is_task("nagaev-iid"));
    CHECK_FALSE(is_task("schema"));
}
