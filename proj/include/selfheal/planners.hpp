#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "selfheal/analyzer.hpp"
#include "selfheal/rules.hpp"

namespace selfheal {

enum class PlannerKind : std::uint8_t { Static, UDriven, Oracle };

std::string_view to_string(PlannerKind kind);
PlannerKind planner_from_string(std::string_view text);

/// How the optimal-oracle planner searches.
enum class OracleMode : std::uint8_t {
    /// Full enumeration of rule assignments x orderings; throws OracleTooLarge above the limit.
    Exhaustive,
    /// Enumeration up to the limit, then per-issue enumeration plus an
    /// adjacent-exchange search that re-evaluates the whole sequence objective.
    Search,
    /// Enumeration up to the limit, then per-issue argmax and ratio ordering.
    Calibrated,
};

struct OracleOptions {
    OracleMode mode = OracleMode::Search;
    std::size_t exhaustive_limit = 6;
};

/// Design-time knowledge of the static planner: one rule per failure class,
/// a fixed class order, and utility estimates from architecture averages.
struct StaticPolicy {
    std::array<std::string_view, 4> rule_for{"LW_REDEPLOY", "RESTART", "HW_REDEPLOY",
                                             "RECREATE_CONNECTOR"};  // CF1..CF4
    std::array<FailureKind, 4> order{FailureKind::CF3, FailureKind::CF1, FailureKind::CF2,
                                     FailureKind::CF4};
    double estimated_u1 = 1.0;
    double estimated_connectivity = 1.0;

    static StaticPolicy for_model(const ArchitectureModel& model);
};

struct Plan {
    PlannerKind planner = PlannerKind::UDriven;
    std::vector<RuleMatch> entries;
    /// Wall-clock seconds spent planning (filled in by timed callers).
    Seconds planning_time = 0.0;
    std::uint64_t rule_instantiations = 0;
};

/// Per issue: best rule by utility increase, ties by ratio; then the k best by
/// ratio, descending. Writes handledBy and bestRules into the annotations.
Plan plan_udriven(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules);

/// Fixed rule per failure class and fixed class order; no runtime utility.
Plan plan_static(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules,
                 const StaticPolicy& policy);

/// Optimal plan by search: maximal final utility first, then maximal reward.
Plan plan_oracle(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules,
                 const OracleOptions& options = {});

/// Sum of utility_increase x completion time for executing `sequence` back to back.
/// Lower is better; the reward lost while the rules run.
double sequence_loss(std::span<const RuleMatch> sequence);

/// Planning-time model fitted to reference measurements on a large testbed.
class PlanningTimeModel {
public:
    /// Predicted planning time in seconds.
    Seconds predict(PlannerKind planner, std::size_t issues, std::size_t components) const;
};

}  // namespace selfheal
