#include <doctest.h>

#include <sstream>

#include "../support/oracles.hpp"
#include "selfheal/failure_profiles.hpp"
#include "selfheal/sim_engine.hpp"

using namespace selfheal;

namespace {

FailureTrace pinned(std::initializer_list<std::tuple<Seconds, FailureKind, ElementRef>> items) {
    FailureTrace t;
    for (auto [time, kind, ref] : items) t.entries.push_back({time, kind, 0, ref});
    return t;
}

SimulationConfig small(PlannerKind planner = PlannerKind::UDriven) {
    SimulationConfig c;
    c.shops = 1;
    c.planner = planner;
    c.seed = 3;
    return c;
}

SimulationTimeline rectangle(double u, double from, double to, double drop) {
    SimulationTimeline t;
    t.breakpoints = {{0.0, u}, {from, u - drop}, {to, u}};
    return t;
}

}  // namespace

TEST_SUITE("sim_engine") {

TEST_CASE("single CF2 drops at injection and recovers after planning plus restart") {
    const SimulationConfig config = small();
    auto model = build_architecture(config.shops, config.seed);
    const auto alts = model.alternatives(model.component(4).slot);
    for (auto t : alts) model.set_reliability(t, t == model.component(4).type ? 1.0 : 0.5);
    const double base = total_utility(model);
    const double drop = u1(model, 4);
    const auto trace = pinned({{10.0, FailureKind::CF2, ElementRef::component(4)}});
    const auto tl = run_simulation(config, trace, model);

    const double planning = PlanningTimeModel{}.predict(PlannerKind::UDriven, 1, 18);
    REQUIRE(tl.breakpoints.size() == 3);
    CHECK(tl.breakpoints[0].utility == base);
    CHECK(tl.breakpoints[1].time == 10.0);
    CHECK(tl.breakpoints[1].utility == base - drop);
    CHECK(tl.breakpoints[2].time == doctest::Approx(10.0 + planning + 2.0));
    CHECK(tl.breakpoints[2].utility == base);
    // the second run consumes the restart's own change events
    REQUIRE(tl.runs.size() == 2);
    CHECK(tl.runs[1].issues == 0);
    CHECK(tl.runs[0].changes == 5);
    CHECK(tl.runs[0].issues == 1);
    CHECK(tl.runs[0].rules_ok == 1);
    CHECK(tl.unresolved == 0);
}

TEST_CASE("reward of a constant utility is a rectangle") {
    SimulationTimeline t;
    t.breakpoints = {{0.0, 7.5}};
    CHECK(reward(t, 0.0, 60.0) == 450.0);
    CHECK(reward(t, 10.0, 20.0) == 75.0);
}

TEST_CASE("reward subtracts drop times duration") {
    const auto t = rectangle(10.0, 5.0, 9.0, 3.0);
    CHECK(reward(t, 0.0, 60.0) == 10.0 * 60.0 - 3.0 * 4.0);
    CHECK(reward(t, 6.0, 8.0) == 7.0 * 2.0);
    CHECK(reward(t, 60.0, 10.0) == 0.0);
    CHECK(t.utility_at(4.999) == 10.0);
    CHECK(t.utility_at(5.0) == 7.0);
    CHECK(t.utility_at(9.0) == 10.0);
}

TEST_CASE("timeline equals the oracle utility at every breakpoint") {
    auto config = small();
    config.shops = 3;
    std::size_t checked = 0;
    config.on_breakpoint = [&](Seconds, double value, const ArchitectureModel& m) {
        ++checked;
        REQUIRE(value == doctest::Approx(oracle::total_utility(m)).epsilon(1e-12));
    };
    for (PlannerKind p : {PlannerKind::Static, PlannerKind::UDriven, PlannerKind::Oracle}) {
        config.planner = p;
        run_simulation(config, generate_synthetic(5, 20, 30.0, 9));
    }
    CHECK(checked > 300);
}

TEST_CASE("runs never overlap and every issue is resolved") {
    auto config = small();
    config.shops = 10;
    config.planning_time_mode = PlanningTimeMode::Measured;
    const auto trace = generate_synthetic(20, 10, 5.0, 4);
    const auto tl = run_simulation(config, trace);
    for (std::size_t i = 1; i < tl.runs.size(); ++i) {
        const auto& prev = tl.runs[i - 1];
        CHECK(tl.runs[i].trigger >= prev.trigger + prev.analyze + prev.plan + prev.execute - 1e-9);
    }
    for (std::size_t i = 1; i < tl.breakpoints.size(); ++i) {
        CHECK(tl.breakpoints[i].time >= tl.breakpoints[i - 1].time);
    }
    CHECK(tl.unresolved == 0);
    CHECK(tl.injected + tl.dropped == 200);
    CHECK(tl.injected > 150);
}

TEST_CASE("static repairs restore the pre-failure utility") {
    auto config = small(PlannerKind::Static);
    config.shops = 5;
    const auto tl = run_simulation(config, generate_synthetic(10, 5, 60.0, 2));
    CHECK(tl.unresolved == 0);
    CHECK(tl.final_utility() == tl.initial_utility());
}

TEST_CASE("reward does not increase with planning delay") {
    auto config = small();
    config.shops = 5;
    config.horizon = 200.0;
    const auto trace = generate_synthetic(8, 1, 1.0, 5);
    double last = std::numeric_limits<double>::infinity();
    for (double delay : {0.0, 1.0, 5.0, 20.0}) {
        config.extra_planning_delay = delay;
        const double r = reward(run_simulation(config, trace), 0.0, 200.0);
        CHECK(r < last);
        last = r;
    }
}

TEST_CASE("likelihood one half needs about two attempts per issue") {
    auto config = small();
    config.shops = 2;
    config.rule_success_likelihood = 0.5;
    const auto tl = run_simulation(config, generate_synthetic(1, 600, 100.0, 8));
    std::size_t ok = 0;
    for (const ExecutedRule& e : tl.executed) {
        ok += e.succeeded;
        if (!e.succeeded) CHECK(e.end - e.start > 0.0);
    }
    REQUIRE(ok > 0);
    const double attempts = static_cast<double>(tl.executed.size()) / static_cast<double>(ok);
    CHECK(attempts == doctest::Approx(2.0).epsilon(0.15));
    CHECK(tl.unresolved == 0);
}

TEST_CASE("invalid likelihood is rejected") {
    auto config = small();
    config.rule_success_likelihood = 0.0;
    CHECK_THROWS_AS(run_simulation(config, FailureTrace{}), Error);
}

TEST_CASE("csv output") {
    auto config = small();
    const auto tl = run_simulation(config, pinned({{1.0, FailureKind::CF1, ElementRef::component(2)}}));
    std::ostringstream a, b;
    write_timeline_csv(a, tl);
    write_runs_csv(b, tl);
    CHECK(a.str().starts_with("time_s,utility\n0.000000,"));
    CHECK(b.str().starts_with("run,trigger_s,analyze_ms,plan_ms,exec_ms,issues,rules_ok,rules_failed\n0,1.000000,"));
}

TEST_CASE("measured planning time") {
    auto m = build_architecture(1, 1);
    std::vector<ChangeEvent> none;
    const auto empty = measure_planning_time(PlannerKind::Static, none, m, 50);
    CHECK(empty.repetitions >= 1);
    CHECK(empty.mean < 1e-3);
    const auto ev = m.inject_failure(FailureKind::CF1, ElementRef::component(0), 0.0);
    const auto one = measure_planning_time(PlannerKind::Static, ev, m, 40);
    CHECK(one.mean > 0.0);
    CHECK(one.mean < 0.05);
}

}
