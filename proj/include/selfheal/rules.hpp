#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "selfheal/arch_model.hpp"
#include "selfheal/utility.hpp"

namespace selfheal {

/// Static execution-time estimates per rule kind, in seconds.
struct RuleCosts {
    Seconds restart = 2.0;
    Seconds lw_redeploy = 4.0;
    Seconds hw_redeploy = 6.0;
    Seconds replace = 10.0;
    Seconds recreate_connector = 1.0;
};

struct RuleTemplate {
    std::string name;
    RepairKind kind = RepairKind::Restart;
    /// Which alternative type a Replace installs.
    std::uint8_t alternative = 0;
    std::vector<FailureKind> applicable_to;
    Seconds cost = 1.0;
    double success_likelihood = 1.0;
    /// Extra model mutation run after the repair; empty for every shipped rule.
    std::function<void(ArchitectureModel&, const RepairAction&, Seconds, std::vector<ChangeEvent>&)>
        side_effect;

    bool applies_to(FailureKind kind) const;
};

using RuleSet = std::vector<RuleTemplate>;

/// RESTART, LW_REDEPLOY, HW_REDEPLOY, REPLACE#0..2, RECREATE_CONNECTOR.
RuleSet default_rule_set(const RuleCosts& costs = {});

struct RuleMatch {
    std::size_t rule = 0;  // index into the rule set
    RepairKind kind = RepairKind::Restart;
    MatchKey issue;
    FailureKind failure = FailureKind::CF1;
    RepairAction action;
    double utility_increase = 0.0;
    Seconds cost = 1.0;
    double ratio = 0.0;
};

/// Builds the repair action a template prescribes for the issue at `issue`.
RepairAction make_action(const ArchitectureModel& model, const RuleTemplate& rule,
                         const MatchKey& issue);

/// Instantiates a rule for an issue with its local utility impact and cost.
RuleMatch instantiate_rule(const ArchitectureModel& model, const RuleSet& rules, std::size_t index,
                           const MatchKey& issue, FailureKind failure);

/// Local utility impact of a rule match on the current model.
double rule_impact(const ArchitectureModel& model, const RuleMatch& match);

/// Applies a rule match to the model, including any side effect of its template.
std::vector<ChangeEvent> apply_rule(ArchitectureModel& model, const RuleSet& rules,
                                    const RuleMatch& match, Seconds time);

/// Descending ratio, then descending utility increase, then issue key.
bool higher_priority(const RuleMatch& a, const RuleMatch& b);

}  // namespace selfheal
