#include <doctest.h>

#include <sstream>

#include "selfheal/experiments.hpp"

using namespace selfheal;

TEST_SUITE("experiments") {

TEST_CASE("fit helpers") {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> line{3, 5, 7, 9};
    CHECK(linear_fit_r2(x, line) == doctest::Approx(1.0));
    const std::vector<double> noisy{1, 4, 2, 3};
    CHECK(linear_fit_r2(x, noisy) < 0.5);
    const std::vector<double> sq{1, 4, 9, 16};
    CHECK(loglog_slope(x, sq) == doctest::Approx(2.0));
}

TEST_CASE("failure groups") {
    auto m = build_architecture(1, 1);
    const auto ev = inject_failure_group(m, 10, 3);
    CHECK(!ev.empty());
    CHECK(issue_oracle(m).size() == 10);
}

TEST_CASE("scalability skips oversized cells") {
    ScalabilitySpec spec;
    spec.shops = {1};
    spec.fgs = {1, 10, 1000};
    spec.repetitions = 3;
    spec.oracle_repetitions = 2;
    std::vector<std::string> notices;
    const auto rows = run_scalability(spec, [&](const std::string& s) { notices.push_back(s); });
    CHECK(rows.size() == 6);
    CHECK(notices.size() == 1);
    std::ostringstream out;
    write_scalability_csv(out, rows);
    CHECK(out.str().find("planner") == 0);
}

TEST_CASE("reward jobs come back in order") {
    const auto trace = named_trace("synthetic-5", 1);
    std::vector<RewardJob> jobs;
    for (PlannerKind p : {PlannerKind::Static, PlannerKind::UDriven, PlannerKind::Oracle}) {
        SimulationConfig c;
        c.shops = 5;
        c.planner = p;
        jobs.push_back({"synthetic-5", &trace, c});
    }
    const auto rows = run_reward_jobs(jobs, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].planner == PlannerKind::Static);
    CHECK(rows[2].planner == PlannerKind::Oracle);
    for (const auto& r : rows) CHECK(r.unresolved == 0);
    const auto serial = run_reward_jobs(jobs, 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(serial[i].reward == rows[i].reward);
}

TEST_CASE("named traces") {
    CHECK(named_trace("grid5000", 1).density() == 1116);
    CHECK(named_trace("synthetic-10", 1).density() == 500);
    CHECK_THROWS_AS(named_trace("martian", 1), Error);
}

TEST_CASE("analytical scenarios reproduce") {
    for (const char* id : {"fig10a", "fig10b", "fig11", "fig14"}) {
        CAPTURE(id);
        const auto result = run_analytical(id);
        CHECK(result.violations.empty());
        CHECK(result.runs.size() >= 2);
    }
    CHECK_THROWS_AS(run_analytical("fig99"), Error);
}

}
