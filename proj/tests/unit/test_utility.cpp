#include <doctest.h>

#include "../support/oracles.hpp"
#include "selfheal/utility.hpp"

using namespace selfheal;

namespace {

ComponentId with_degree(const ArchitectureModel& m, std::size_t degree) {
    for (const Component& c : m.components()) {
        if (c.connectivity() == degree) return c.id;
    }
    FAIL("no component with the requested degree");
    return 0;
}

}  // namespace

TEST_SUITE("utility") {

TEST_CASE("u1 is criticality x reliability x connectivity") {
    auto m = build_architecture(1, 1);
    const ComponentId c = with_degree(m, 3);
    m.set_criticality(c, 2.0);
    m.set_reliability(m.component(c).type, 0.9);
    CHECK(u1(m, c) == doctest::Approx(5.4));
    CHECK(u2(m, c) == doctest::Approx(-5.4));
}

TEST_CASE("healthy shop utility is the sum of u1 over its 18 components") {
    const auto m = build_architecture(1, 6);
    double sum = 0.0;
    for (const Component& c : m.components()) sum += u1(m, c.id);
    CHECK(total_utility(m) == sum);
    CHECK(find_all_matches(m).size() == 18);
}

TEST_CASE("a CF2 adds u2 of the affected component") {
    auto m = build_architecture(1, 6);
    const double before = total_utility(m);
    m.inject_failure(FailureKind::CF2, ElementRef::component(7), 0.0);
    CHECK(total_utility(m) == before + u2(m, 7));
}

TEST_CASE("drops per failure kind") {
    auto m = build_architecture(2, 3);
    const double before = total_utility(m);
    SUBCASE("CF1 loses the positive match and adds the negative one") {
        m.inject_failure(FailureKind::CF1, ElementRef::component(3), 0.0);
        CHECK(total_utility(m) == before - 2.0 * u1(m, 3));
    }
    SUBCASE("CF3 likewise") {
        m.inject_failure(FailureKind::CF3, ElementRef::component(3), 0.0);
        CHECK(total_utility(m) == before - 2.0 * u1(m, 3));
    }
    SUBCASE("CF4 costs criticality x reliability of the source") {
        m.inject_failure(FailureKind::CF4, ElementRef::connector(4), 0.0);
        const Component& s = m.component(m.connector(4).source);
        CHECK(total_utility(m) == before - s.criticality * m.type(s.type).reliability);
    }
}

TEST_CASE("sign discipline") {
    auto m = build_architecture(3, 12);
    Rng rng(4);
    const RuleSet rules = default_rule_set();
    for (int i = 0; i < 200; ++i) oracle::random_step(m, rules, rng, i);
    for (const Match& match : find_all_matches(m)) {
        if (pattern(match.pattern).polarity == Polarity::Positive) CHECK(match.utility >= 0.0);
        else CHECK(match.utility <= 0.0);
    }
}

TEST_CASE("ledger delta for explicit match sets") {
    auto m = build_architecture(1, 2);
    UtilityLedger ledger(m);
    CHECK(utility_delta(ledger, {}, {}) == 0.0);
    const Match negative{PatternId::FailingComponent, ElementRef::component(0), 0, -5.4};
    CHECK(utility_delta(ledger, std::vector{negative}, {}) == doctest::Approx(-5.4));
    CHECK(utility_delta(ledger, {}, std::vector{negative}) == doctest::Approx(5.4));
}

TEST_CASE("ledger follows random schedules exactly") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto m = build_architecture(1 + seed % 5, seed);
        UtilityLedger ledger(m);
        Rng rng(seed);
        const RuleSet rules = default_rule_set();
        for (int step = 0; step < 60; ++step) {
            const auto events = oracle::random_step(m, rules, rng, step);
            ledger.refresh(m, touched_anchors(m, events));
            REQUIRE(ledger.total() == doctest::Approx(oracle::total_utility(m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("ledger returns to the pre-failure total after a repair") {
    auto m = build_architecture(1, 2);
    UtilityLedger ledger(m);
    const double start = ledger.total();
    auto ev = m.inject_failure(FailureKind::CF2, ElementRef::component(5), 0.0);
    ledger.refresh(m, touched_anchors(m, ev));
    CHECK(ledger.total() < start);
    ev = m.apply_repair({RepairKind::Restart, ElementRef::component(5), 0}, 1.0);
    ledger.refresh(m, touched_anchors(m, ev));
    CHECK(ledger.total() == start);
}

TEST_CASE("rule impact") {
    auto m = build_architecture(1, 1);
    const ComponentId c = with_degree(m, 3);
    const std::uint8_t slot = m.component(c).slot;
    const auto alts = m.alternatives(slot);
    m.set_reliability(alts[0], 0.70);
    m.set_reliability(alts[1], 0.95);
    m.set_component_type(c, alts[0]);
    m.set_criticality(c, 2.0);

    SUBCASE("restart on CF2 recovers |u2|") {
        m.inject_failure(FailureKind::CF2, ElementRef::component(c), 0.0);
        const double impact = repair_impact(m, {RepairKind::Restart, ElementRef::component(c), 0});
        CHECK(impact == doctest::Approx(2.0 * 0.7 * 3));
    }
    SUBCASE("replace by the more reliable type adds the reliability gain") {
        m.inject_failure(FailureKind::CF3, ElementRef::component(c), 0.0);
        const double hw = repair_impact(m, {RepairKind::HwRedeploy, ElementRef::component(c), 0});
        const double replace = repair_impact(m, {RepairKind::Replace, ElementRef::component(c), alts[1]});
        CHECK(replace - hw == doctest::Approx((0.95 - 0.70) * 2 * 3));
    }
    SUBCASE("impact of a resolved issue is rejected") {
        CHECK_THROWS_AS(repair_impact(m, {RepairKind::Restart, ElementRef::component(c), 0}),
                        InvalidRuleMatch);
    }
}

TEST_CASE("matching is local") {
    for (std::size_t shops : {1, 10, 100}) {
        auto m = build_architecture(shops, 3);
        m.inject_failure(FailureKind::CF4, ElementRef::connector(2), 0.0);
        SearchStats stats;
        for (const Pattern& p : all_patterns()) {
            const ElementRef anchor = p.anchor_kind == ElementKind::Component ? ElementRef::component(1)
                                                                              : ElementRef::connector(2);
            match_at(m, p.id, anchor, &stats);
        }
        CHECK(stats.elements_visited <= 12);
    }
}

}
