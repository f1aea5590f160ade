#include <doctest.h>

#include <cmath>
#include <sstream>

#include "selfheal/failure_profiles.hpp"
#include "selfheal/trace.hpp"

using namespace selfheal;

namespace {

FailureTrace parse(const std::string& text) {
    std::istringstream in(text);
    return read_trace(in);
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("round trip") {
    const auto t = generate_realistic(profile_model("deug"), 5);
    const auto back = parse(trace_to_string(t));
    CHECK(back.model == t.model);
    CHECK(back.seed == t.seed);
    CHECK(back.bursts == t.bursts);
    REQUIRE(back.density() == t.density());
    for (std::size_t i = 0; i < t.density(); ++i) {
        CHECK(std::abs(back.entries[i].time - t.entries[i].time) <= 5e-7);
        CHECK(back.entries[i].kind == t.entries[i].kind);
        CHECK(back.entries[i].selector == t.entries[i].selector);
    }
    CHECK(trace_to_string(back) == trace_to_string(t));
}

TEST_CASE("header format") {
    const auto text = trace_to_string(generate_synthetic(2, 1, 1.0, 3));
    CHECK(text.find("# density=2\n") != std::string::npos);
    CHECK(text.find("time_s,cf_kind,target_selector\n0.000000,CF") != std::string::npos);
}

TEST_CASE("malformed input") {
    const std::string head = "time_s,cf_kind,target_selector\n";
    CHECK_THROWS_AS(parse(""), Error);
    CHECK_THROWS_AS(parse("time,kind\n1,CF1,2\n"), Error);
    CHECK_THROWS_AS(parse(head + "1.0,CF1\n"), Error);
    CHECK_THROWS_AS(parse(head + "x,CF1,2\n"), Error);
    CHECK_THROWS_AS(parse(head + "1.0,CF9,2\n"), Error);
    CHECK_THROWS_AS(parse(head + "2.0,CF1,2\n1.0,CF1,3\n"), Error);
    CHECK_THROWS_AS(parse("# density=3\n" + head + "1.0,CF1,2\n"), Error);
    CHECK(parse(head + "1.0,CF4,2\n").entries[0].kind == FailureKind::CF4);
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_trace("/nonexistent/trace.csv"), Error);
}

}
