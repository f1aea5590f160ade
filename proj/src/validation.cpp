#include "selfheal/validation.hpp"

#include <cmath>
#include <map>
#include <set>

#include "selfheal/random.hpp"

namespace selfheal {

namespace {

using MatchMap = std::map<MatchKey, double>;

MatchMap snapshot(const ArchitectureModel& model) {
    MatchMap out;
    for (const Match& m : find_all_matches(model)) out.emplace(m.key(), m.utility);
    return out;
}

bool negative(const MatchKey& key) { return pattern(key.pattern).polarity == Polarity::Negative; }

std::string describe(const MatchKey& key) {
    return std::string(pattern(key.pattern).name) +
           (key.anchor.kind == ElementKind::Component ? " at component " : " at connector ") +
           std::to_string(key.anchor.id);
}

// A second issue next to the first, so interference through shared connectors shows up.
void inject_neighbour_issue(ArchitectureModel& model, ElementRef first) {
    ComponentId near = 0;
    if (first.kind == ElementKind::Connector) {
        near = model.connector(first.id).target;
    } else {
        const Component& c = model.component(first.id);
        const Connector& k = model.connector(c.connectors.front());
        near = k.source == c.id ? k.target : k.source;
    }
    ElementRef candidate = ElementRef::component(near);
    if (!model.is_eligible(FailureKind::CF2, candidate)) {
        auto other = model.select_target(FailureKind::CF2, 0x51debeefULL);
        if (!other) return;
        candidate = *other;
    }
    model.inject_failure(FailureKind::CF2, candidate, 0.0);
}

}  // namespace

RuleSetReport validate_rule_set(const RuleSet& rules, std::uint64_t seed) {
    RuleSetReport report;
    auto flag = [&](const RuleTemplate& rule, std::string assumption, std::string detail) {
        report.violations.push_back({rule.name, std::move(assumption), std::move(detail)});
    };

    for (std::size_t r = 0; r < rules.size(); ++r) {
        const RuleTemplate& rule = rules[r];
        if (rule.applicable_to.empty()) flag(rule, "A1", "not linked to any negative pattern");
        if (!(rule.cost > 0.0)) flag(rule, "A1", "cost must be positive");
        if (rule.success_likelihood < 1.0) {
            flag(rule, "A2", "success likelihood " + std::to_string(rule.success_likelihood) + " < 1");
        }

        for (FailureKind kind : rule.applicable_to) {
            ++report.checks;
            ArchitectureModel model = build_architecture(2, seed);
            const auto target = model.select_target(
                kind, mix64(seed ^ (r * 0x9e37ULL + static_cast<std::uint64_t>(kind))));
            if (!target) {
                flag(rule, "A2", "no eligible " + std::string(to_string(kind)) + " target");
                continue;
            }
            model.inject_failure(kind, *target, 0.0);
            inject_neighbour_issue(model, *target);

            const auto issue = negative_match_at(model, *target);
            if (!issue) {
                flag(rule, "A1", "no negative pattern for " + std::string(to_string(kind)));
                continue;
            }
            const MatchMap before = snapshot(model);
            const double utility_before = total_utility(model);

            RuleMatch match;
            try {
                match = instantiate_rule(model, rules, r, issue->key(), kind);
                apply_rule(model, rules, match, 1.0);
            } catch (const Error& e) {
                flag(rule, "A2", std::string("repair failed: ") + e.what());
                continue;
            }
            const MatchMap after = snapshot(model);

            std::set<ElementRef> scope{*target};
            if (target->kind == ElementKind::Component) {
                const Component& old = model.component(target->id);
                scope.insert(ElementRef::component(model.shop(old.shop).slots[old.slot]));
            }

            if (after.contains(issue->key())) flag(rule, "A2", "issue still matched after repair");
            for (const auto& [key, value] : after) {
                if (negative(key) && !before.contains(key)) flag(rule, "A3a", "creates " + describe(key));
                if (!negative(key) && !before.contains(key) && !scope.contains(key.anchor)) {
                    flag(rule, "A5", "enables " + describe(key) + " outside its scope");
                }
            }
            for (const auto& [key, value] : before) {
                auto it = after.find(key);
                if (it == after.end()) {
                    if (negative(key) && key != issue->key()) flag(rule, "A3b", "removes " + describe(key));
                    if (!negative(key) && !scope.contains(key.anchor)) {
                        flag(rule, "A5", "disables " + describe(key) + " outside its scope");
                    }
                } else if (it->second != value && !scope.contains(key.anchor)) {
                    flag(rule, "A4", "changes the utility of " + describe(key));
                }
            }
            const double realized = total_utility(model) - utility_before;
            if (std::abs(realized - match.utility_increase) > 1e-9) {
                flag(rule, "A5", "predicted impact " + std::to_string(match.utility_increase) +
                                     " but realized " + std::to_string(realized));
            }
        }
    }
    return report;
}

}  // namespace selfheal
