#pragma once

// Test-side reference implementations. They read the model's raw state and
// never call the library's matching or impact code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "selfheal/analyzer.hpp"
#include "selfheal/random.hpp"
#include "selfheal/rules.hpp"

namespace oracle {

using namespace selfheal;

inline double component_value(const ArchitectureModel& m, const Component& c) {
    return c.criticality * m.type(c.type).reliability * static_cast<double>(c.connectors.size());
}

/// Utility straight from the definitions: every STARTED component adds its
/// value; crashed, removed and exception-ridden started components subtract it;
/// a crashed connector subtracts criticality x reliability of its source.
inline double total_utility(const ArchitectureModel& m) {
    double total = 0.0;
    for (const Component& c : m.components()) {
        if (c.retired) continue;
        const double v = component_value(m, c);
        switch (c.state) {
            case LifecycleState::Started:
                total += v;
                if (c.failures.size() >= kExceptionThreshold) total -= v;
                break;
            case LifecycleState::Crashed:
            case LifecycleState::Removed: total -= v; break;
            default: break;
        }
    }
    for (const Connector& k : m.connectors()) {
        if (k.state != ConnectorState::Crashed) continue;
        const Component& s = m.component(k.source);
        total -= s.criticality * m.type(s.type).reliability;
    }
    return total;
}

/// Issue key -> utility drop from raw state.
inline std::map<MatchKey, double> issues(const ArchitectureModel& m) {
    std::map<MatchKey, double> out;
    for (const Component& c : m.components()) {
        if (c.retired) continue;
        const auto ref = ElementRef::component(c.id);
        const double v = -component_value(m, c);
        if (c.state == LifecycleState::Crashed) out[{PatternId::CrashedComponent, ref}] = v;
        if (c.state == LifecycleState::Removed) out[{PatternId::RemovedComponent, ref}] = v;
        if (c.state == LifecycleState::Started && c.failures.size() >= kExceptionThreshold) {
            out[{PatternId::FailingComponent, ref}] = v;
        }
    }
    for (const Connector& k : m.connectors()) {
        if (k.state != ConnectorState::Crashed) continue;
        const Component& s = m.component(k.source);
        out[{PatternId::CrashedConnector, ElementRef::connector(k.id)}] =
            -s.criticality * m.type(s.type).reliability;
    }
    return out;
}

inline FailureKind kind_of(PatternId id) {
    switch (id) {
        case PatternId::CrashedComponent: return FailureKind::CF1;
        case PatternId::FailingComponent: return FailureKind::CF2;
        case PatternId::RemovedComponent: return FailureKind::CF3;
        default: return FailureKind::CF4;
    }
}

/// Realized utility change of applying a rule, on a copy of the model.
inline double realized_impact(const ArchitectureModel& m, const RuleSet& rules, const RuleMatch& r) {
    ArchitectureModel copy = m;
    const double before = oracle::total_utility(copy);
    apply_rule(copy, rules, r, 0.0);
    return oracle::total_utility(copy) - before;
}

/// One random step: inject a failure, or repair a random open issue with a
/// random applicable rule. Returns the change events.
inline std::vector<ChangeEvent> random_step(ArchitectureModel& m, const RuleSet& rules, Rng& rng,
                                            Seconds t) {
    const auto open = issues(m);
    if (open.empty() || rng.uniform() < 0.55) {
        const auto kind = static_cast<FailureKind>(rng.uniform_int(0, 3));
        const auto target = m.select_target(kind, rng.next());
        if (!target) return {};
        return m.inject_failure(kind, *target, t);
    }
    auto it = open.begin();
    std::advance(it, static_cast<long>(rng.uniform_int(0, open.size() - 1)));
    const FailureKind kind = kind_of(it->first.pattern);
    std::vector<std::size_t> applicable;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        if (rules[r].applies_to(kind)) applicable.push_back(r);
    }
    const std::size_t r = applicable[rng.uniform_int(0, applicable.size() - 1)];
    const RuleMatch match = instantiate_rule(m, rules, r, it->first, kind);
    return apply_rule(m, rules, match, t);
}

/// Reward lost while executing `seq` back to back, from the realized impacts.
inline double loss(const std::vector<RuleMatch>& seq) {
    double clock = 0.0, total = 0.0;
    for (const RuleMatch& r : seq) {
        clock += r.cost;
        total += r.utility_increase * clock;
    }
    return total;
}

struct Best {
    double final_gain = -std::numeric_limits<double>::infinity();
    double loss = std::numeric_limits<double>::infinity();
};

/// Full enumeration of every rule assignment and every ordering.
inline Best enumerate(const std::vector<std::vector<RuleMatch>>& options) {
    Best best;
    const std::size_t n = options.size();
    std::vector<std::size_t> choice(n, 0);
    while (true) {
        std::vector<RuleMatch> pick(n);
        double gain = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pick[i] = options[i][choice[i]];
            gain += pick[i].utility_increase;
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        do {
            double clock = 0.0, l = 0.0;
            for (std::size_t i : order) {
                clock += pick[i].cost;
                l += pick[i].utility_increase * clock;
            }
            if (gain > best.final_gain + 1e-9 || (std::abs(gain - best.final_gain) <= 1e-9 && l < best.loss)) {
                best.final_gain = gain;
                best.loss = l;
            }
        } while (std::next_permutation(order.begin(), order.end()));
        std::size_t d = 0;
        while (d < n && ++choice[d] == options[d].size()) choice[d++] = 0;
        if (d == n) break;
    }
    return best;
}

}  // namespace oracle
