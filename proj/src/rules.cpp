#include "selfheal/rules.hpp"

#include <algorithm>

namespace selfheal {

bool RuleTemplate::applies_to(FailureKind kind) const {
    return std::find(applicable_to.begin(), applicable_to.end(), kind) != applicable_to.end();
}

RuleSet default_rule_set(const RuleCosts& costs) {
    using enum FailureKind;
    RuleSet rules;
    auto add = [&](std::string name, RepairKind kind, std::uint8_t alt,
                   std::vector<FailureKind> targets, Seconds cost) {
        RuleTemplate rule;
        rule.name = std::move(name);
        rule.kind = kind;
        rule.alternative = alt;
        rule.applicable_to = std::move(targets);
        rule.cost = cost;
        rules.push_back(std::move(rule));
    };
    add("RESTART", RepairKind::Restart, 0, {CF1, CF2}, costs.restart);
    add("LW_REDEPLOY", RepairKind::LwRedeploy, 0, {CF1, CF2}, costs.lw_redeploy);
    add("HW_REDEPLOY", RepairKind::HwRedeploy, 0, {CF1, CF2, CF3}, costs.hw_redeploy);
    for (std::uint8_t alt = 0; alt < kAlternativesPerSlot; ++alt) {
        add("REPLACE#" + std::to_string(alt), RepairKind::Replace, alt, {CF1, CF2, CF3},
            costs.replace);
    }
    add("RECREATE_CONNECTOR", RepairKind::RecreateConnector, 0, {CF4}, costs.recreate_connector);
    return rules;
}

RepairAction make_action(const ArchitectureModel& model, const RuleTemplate& rule,
                         const MatchKey& issue) {
    RepairAction action{rule.kind, issue.anchor, 0};
    if (rule.kind == RepairKind::Replace) {
        if (issue.anchor.kind != ElementKind::Component || !model.contains(issue.anchor)) {
            throw InvalidRuleMatch("replace needs a component issue");
        }
        action.replacement_type = model.alternatives(model.component(issue.anchor.id).slot)
                                      .at(rule.alternative);
    }
    return action;
}

RuleMatch instantiate_rule(const ArchitectureModel& model, const RuleSet& rules, std::size_t index,
                           const MatchKey& issue, FailureKind failure) {
    const RuleTemplate& rule = rules.at(index);
    RuleMatch match;
    match.rule = index;
    match.kind = rule.kind;
    match.issue = issue;
    match.failure = failure;
    match.action = make_action(model, rule, issue);
    match.utility_increase = repair_impact(model, match.action);
    match.cost = rule.cost;
    match.ratio = match.utility_increase / match.cost;
    return match;
}

double rule_impact(const ArchitectureModel& model, const RuleMatch& match) {
    return repair_impact(model, match.action);
}

std::vector<ChangeEvent> apply_rule(ArchitectureModel& model, const RuleSet& rules,
                                    const RuleMatch& match, Seconds time) {
    auto events = model.apply_repair(match.action, time);
    const RuleTemplate& rule = rules.at(match.rule);
    if (rule.side_effect) rule.side_effect(model, match.action, time, events);
    return events;
}

bool higher_priority(const RuleMatch& a, const RuleMatch& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.utility_increase != b.utility_increase) return a.utility_increase > b.utility_increase;
    return a.issue < b.issue;
}

}  // namespace selfheal
