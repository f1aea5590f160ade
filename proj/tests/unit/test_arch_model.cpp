#include <doctest.h>

#include <cmath>

#include <set>

#include "selfheal/arch_model.hpp"

using namespace selfheal;

TEST_SUITE("arch_model") {

TEST_CASE("shop layout has 18 components and degrees between 2 and 6") {
    const auto model = build_architecture(1, 3);
    CHECK(model.components().size() == 18);
    CHECK(model.connectors().size() == shop_topology().size());
    std::size_t max_degree = 0;
    for (const Component& c : model.components()) {
        CHECK(c.connectivity() >= 2);
        CHECK(c.connectivity() <= 6);
        max_degree = std::max(max_degree, c.connectivity());
    }
    CHECK(max_degree == 6);
}

TEST_CASE("build is deterministic per seed") {
    CHECK(to_snapshot(build_architecture(3, 9)) == to_snapshot(build_architecture(3, 9)));
    CHECK(to_snapshot(build_architecture(3, 9)) != to_snapshot(build_architecture(3, 10)));
}

TEST_CASE("attributes lie in their ranges and reliabilities are dyadic") {
    const auto model = build_architecture(20, 5);
    for (const Component& c : model.components()) {
        CHECK(c.criticality >= 1.0);
        CHECK(c.criticality <= 10.0);
        CHECK(c.state == LifecycleState::Started);
    }
    for (std::uint8_t slot = 0; slot < kSlotsPerShop; ++slot) {
        std::set<double> seen;
        for (ComponentTypeId t : model.alternatives(slot)) {
            const double r = model.type(t).reliability;
            CHECK(r >= 0.5);
            CHECK(r <= 1.0);
            CHECK(r * 1024.0 == std::floor(r * 1024.0));
            CHECK(model.type(t).slot == slot);
            seen.insert(r);
        }
        CHECK(seen.size() == kAlternativesPerSlot);
    }
}

TEST_CASE("zero shops is rejected") { CHECK_THROWS_AS(build_architecture(0, 1), Error); }

TEST_CASE("failure injection sets state and emits events") {
    auto model = build_architecture(1, 1);
    SUBCASE("CF1 crashes") {
        auto ev = model.inject_failure(FailureKind::CF1, ElementRef::component(4), 2.0);
        REQUIRE(ev.size() == 1);
        CHECK(ev[0].kind == ChangeKind::ComponentCrashed);
        CHECK(model.component(4).state == LifecycleState::Crashed);
    }
    SUBCASE("CF2 adds five exceptions") {
        auto ev = model.inject_failure(FailureKind::CF2, ElementRef::component(4), 2.0);
        CHECK(ev.size() == kExceptionThreshold);
        CHECK(model.component(4).failures.size() == kExceptionThreshold);
        CHECK(model.component(4).state == LifecycleState::Started);
    }
    SUBCASE("CF3 removes") {
        model.inject_failure(FailureKind::CF3, ElementRef::component(4), 2.0);
        CHECK(model.component(4).state == LifecycleState::Removed);
    }
    SUBCASE("CF4 crashes a connector") {
        model.inject_failure(FailureKind::CF4, ElementRef::connector(0), 2.0);
        CHECK(model.connector(0).state == ConnectorState::Crashed);
        CHECK_FALSE(model.is_healthy(model.connector(0).source));
    }
    SUBCASE("a faulty component is not eligible again") {
        model.inject_failure(FailureKind::CF1, ElementRef::component(4), 2.0);
        CHECK_THROWS_AS(model.inject_failure(FailureKind::CF2, ElementRef::component(4), 3.0),
                        TargetNotEligible);
        CHECK_THROWS_AS(model.inject_failure(FailureKind::CF1, ElementRef::connector(0), 3.0),
                        TargetNotEligible);
    }
}

TEST_CASE("repairs restore the component") {
    auto model = build_architecture(1, 1);
    model.inject_failure(FailureKind::CF1, ElementRef::component(2), 0.0);
    model.apply_repair({RepairKind::Restart, ElementRef::component(2), 0}, 1.0);
    CHECK(model.is_healthy(2));
    CHECK_THROWS_AS(model.apply_repair({RepairKind::Restart, ElementRef::component(2), 0}, 2.0),
                    StaleMatch);

    model.inject_failure(FailureKind::CF3, ElementRef::component(3), 0.0);
    model.apply_repair({RepairKind::HwRedeploy, ElementRef::component(3), 0}, 1.0);
    CHECK(model.is_healthy(3));

    model.inject_failure(FailureKind::CF4, ElementRef::connector(5), 0.0);
    model.apply_repair({RepairKind::RecreateConnector, ElementRef::connector(5), 0}, 1.0);
    CHECK(model.connector(5).state == ConnectorState::Ok);
}

TEST_CASE("replace installs a new instance and rewires its connectors") {
    auto model = build_architecture(2, 4);
    const ComponentId old_id = model.shop(1).slots[0];
    const std::size_t degree = model.component(old_id).connectivity();
    model.inject_failure(FailureKind::CF3, ElementRef::component(old_id), 0.0);
    const ComponentTypeId type = model.alternatives(0)[2];
    auto ev = model.apply_repair({RepairKind::Replace, ElementRef::component(old_id), type}, 1.0);
    REQUIRE(ev.size() == 1);
    const ComponentId fresh = ev[0].replacement;
    CHECK(model.component(old_id).retired);
    CHECK(model.component(old_id).connectors.empty());
    CHECK(model.shop(1).slots[0] == fresh);
    CHECK(model.component(fresh).type == type);
    CHECK(model.component(fresh).connectivity() == degree);
    CHECK(model.component(fresh).criticality == model.component(old_id).criticality);
    for (ConnectorId cid : model.component(fresh).connectors) {
        const Connector& k = model.connector(cid);
        CHECK((k.source == fresh || k.target == fresh));
    }
    CHECK(model.live_component_count() == 36);
    CHECK_THROWS_AS(model.apply_repair({RepairKind::Restart, ElementRef::component(old_id), 0}, 2.0),
                    StaleMatch);
}

TEST_CASE("replay of the event log reproduces the model") {
    auto model = build_architecture(2, 8);
    const auto start = model;
    std::vector<ChangeEvent> log;
    auto add = [&](std::vector<ChangeEvent> ev) { log.insert(log.end(), ev.begin(), ev.end()); };
    add(model.inject_failure(FailureKind::CF2, ElementRef::component(1), 0.0));
    add(model.inject_failure(FailureKind::CF4, ElementRef::connector(40), 0.0));
    add(model.inject_failure(FailureKind::CF3, ElementRef::component(20), 0.0));
    add(model.apply_repair({RepairKind::Replace, ElementRef::component(20), model.alternatives(2)[1]}, 1.0));
    add(model.apply_repair({RepairKind::Restart, ElementRef::component(1), 0}, 2.0));
    auto copy = start;
    copy.replay(log);
    CHECK(to_snapshot(copy) == to_snapshot(model));
}

TEST_CASE("selectors resolve to eligible targets and re-roll") {
    auto model = build_architecture(1, 2);
    for (std::uint64_t s = 0; s < 17; ++s) {
        auto t = model.select_target(FailureKind::CF1, s);
        REQUIRE(t);
        model.inject_failure(FailureKind::CF1, *t, 0.0);
    }
    auto last = model.select_target(FailureKind::CF2, 99);
    REQUIRE(last);
    model.inject_failure(FailureKind::CF2, *last, 0.0);
    CHECK_FALSE(model.select_target(FailureKind::CF3, 5));
    CHECK_FALSE(model.select_target(FailureKind::CF4, 5));
}

}
