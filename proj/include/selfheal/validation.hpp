#pragma once

#include <string>
#include <vector>

#include "selfheal/rules.hpp"

namespace selfheal {

struct RuleViolation {
    std::string rule;
    /// A1, A2, A3a (creates an issue), A3b (removes another issue), A4, A5.
    std::string assumption;
    std::string detail;
};

struct RuleSetReport {
    std::vector<RuleViolation> violations;
    std::size_t checks = 0;

    bool ok() const { return violations.empty(); }
};

/// Exercises every rule on small two-issue models and checks the
/// independence assumptions the u-driven planner relies on.
RuleSetReport validate_rule_set(const RuleSet& rules, std::uint64_t seed = 1);

}  // namespace selfheal
