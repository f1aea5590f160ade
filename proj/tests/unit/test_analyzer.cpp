#include <doctest.h>

#include "../support/oracles.hpp"

using namespace selfheal;

TEST_SUITE("analyzer") {

TEST_CASE("empty change set on empty annotations is a no-op") {
    const auto m = build_architecture(1, 1);
    Annotations a;
    const auto report = analyze(a, {}, m);
    CHECK(a.issues().empty());
    CHECK(report.match_attempts == 0);
}

TEST_CASE("five exceptions make one CF2 issue") {
    auto m = build_architecture(1, 1);
    Annotations a;
    const auto events = m.inject_failure(FailureKind::CF2, ElementRef::component(3), 0.0);
    REQUIRE(events.size() == 5);
    analyze(a, events, m);
    REQUIRE(a.issues().size() == 1);
    const Issue& issue = a.issues().begin()->second;
    CHECK(issue.failure == FailureKind::CF2);
    CHECK(issue.affected_component() == 3);
    CHECK(issue.utility_drop == u2(m, 3));
}

TEST_CASE("failure repaired before analysis leaves no issue") {
    auto m = build_architecture(1, 1);
    Annotations a;
    auto events = m.inject_failure(FailureKind::CF1, ElementRef::component(2), 0.0);
    auto repair = m.apply_repair({RepairKind::Restart, ElementRef::component(2), 0}, 1.0);
    events.insert(events.end(), repair.begin(), repair.end());
    analyze(a, events, m);
    CHECK(a.issues().empty());
    CHECK(oracle::issues(m).empty());
}

TEST_CASE("three injections give three issues and analysis is idempotent") {
    auto m = build_architecture(2, 5);
    Annotations a;
    std::vector<ChangeEvent> c;
    for (auto [kind, ref] : {std::pair{FailureKind::CF1, ElementRef::component(1)},
                             std::pair{FailureKind::CF3, ElementRef::component(20)},
                             std::pair{FailureKind::CF4, ElementRef::connector(50)}}) {
        auto ev = m.inject_failure(kind, ref, 0.0);
        c.insert(c.end(), ev.begin(), ev.end());
    }
    analyze(a, c, m);
    CHECK(a.issues().size() == 3);
    CHECK(issue_set(a) == issue_oracle(m));
    analyze(a, c, m);
    CHECK(issue_set(a) == issue_oracle(m));
    CHECK(a.issues().size() == 3);
}

TEST_CASE("replacement is re-examined through the new instance") {
    auto m = build_architecture(1, 5);
    Annotations a;
    analyze(a, m.inject_failure(FailureKind::CF3, ElementRef::component(4), 0.0), m);
    const auto ev = m.apply_repair({RepairKind::Replace, ElementRef::component(4), m.alternatives(m.component(4).slot)[0]}, 1.0);
    analyze(a, ev, m);
    CHECK(a.issues().empty());
}

TEST_CASE("analysis matches the exhaustive oracle on random schedules") {
    const RuleSet rules = default_rule_set();
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto m = build_architecture(1 + seed % 4, seed);
        Annotations a;
        Rng rng(seed * 7);
        for (int batch = 0; batch < 15; ++batch) {
            std::vector<ChangeEvent> c;
            const auto size = rng.uniform_int(1, 4);
            for (std::uint64_t i = 0; i < size; ++i) {
                auto ev = oracle::random_step(m, rules, rng, batch);
                c.insert(c.end(), ev.begin(), ev.end());
            }
            analyze(a, c, m);
            REQUIRE(issue_set(a) == oracle::issues(m));
        }
    }
}

TEST_CASE("work is bounded by changes plus stored issues") {
    auto m = build_architecture(50, 2);
    Annotations a;
    std::vector<ChangeEvent> c;
    for (ComponentId id = 0; id < 30; ++id) {
        auto ev = m.inject_failure(FailureKind::CF1, ElementRef::component(id * 18), 0.0);
        c.insert(c.end(), ev.begin(), ev.end());
    }
    const auto first = analyze(a, c, m);
    CHECK(first.match_attempts <= 4 * c.size());
    auto ev = m.inject_failure(FailureKind::CF2, ElementRef::component(5), 0.0);
    const auto second = analyze(a, ev, m);
    CHECK(second.match_attempts <= 30 + 4 * ev.size());
}

TEST_CASE("best rules keep the k highest ratios in descending order") {
    Annotations a(3);
    for (int i = 0; i < 10; ++i) {
        RuleMatch r;
        r.issue = {PatternId::CrashedComponent, ElementRef::component(static_cast<ComponentId>(i))};
        r.utility_increase = i;
        r.cost = 1.0;
        r.ratio = (i * 7) % 10;
        a.add_best_rule(r);
    }
    const auto& best = a.best_rules();
    REQUIRE(best.size() == 3);
    CHECK(best[0].ratio == 9);
    CHECK(best[1].ratio == 8);
    CHECK(best[2].ratio == 7);
}

}
