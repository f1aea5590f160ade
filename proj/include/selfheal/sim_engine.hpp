#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfheal/analyzer.hpp"
#include "selfheal/planners.hpp"
#include "selfheal/rules.hpp"
#include "selfheal/trace.hpp"

namespace selfheal {

enum class PlanningTimeMode : std::uint8_t { Measured, Calibrated };

std::string_view to_string(PlanningTimeMode mode);
PlanningTimeMode planning_time_mode_from_string(std::string_view text);

struct SimulationConfig {
    std::size_t shops = 100;
    PlannerKind planner = PlannerKind::UDriven;
    std::size_t k = 100;
    double rule_success_likelihood = 1.0;
    RuleCosts rule_costs;
    std::uint64_t seed = 1;
    PlanningTimeMode planning_time_mode = PlanningTimeMode::Calibrated;
    /// Unset: Calibrated mode for calibrated timing, Search otherwise.
    std::optional<OracleMode> oracle_mode;
    std::size_t oracle_exhaustive_limit = 6;
    /// Added to every run's planning delay.
    Seconds extra_planning_delay = 0.0;
    /// Reward window end; the timeline is extended to at least this time.
    Seconds horizon = 0.0;
    /// Called after every utility change with the time, timeline value and model.
    std::function<void(Seconds, double, const ArchitectureModel&)> on_breakpoint;
};

struct Breakpoint {
    Seconds time = 0.0;
    double utility = 0.0;
};

struct MapeRunRecord {
    std::size_t run = 0;
    Seconds trigger = 0.0;
    Seconds analyze = 0.0;
    Seconds plan = 0.0;
    Seconds execute = 0.0;
    std::size_t changes = 0;  // events consumed by analysis
    std::size_t issues = 0;   // unprocessed issues after analysis
    std::size_t rules_ok = 0;
    std::size_t rules_failed = 0;
};

struct ExecutedRule {
    std::size_t run = 0;
    Seconds start = 0.0;
    Seconds end = 0.0;
    std::string rule;
    MatchKey issue;
    FailureKind failure = FailureKind::CF1;
    bool succeeded = false;
};

struct SimulationTimeline {
    /// The first breakpoint is the utility before any failure.
    std::vector<Breakpoint> breakpoints;
    std::vector<MapeRunRecord> runs;
    std::vector<ExecutedRule> executed;
    Seconds end = 0.0;
    std::size_t injected = 0;
    /// Trace entries that found no eligible target.
    std::size_t dropped = 0;
    /// Issues still open when the simulation ended.
    std::size_t unresolved = 0;

    double initial_utility() const { return breakpoints.empty() ? 0.0 : breakpoints.front().utility; }
    double final_utility() const { return breakpoints.empty() ? 0.0 : breakpoints.back().utility; }
    /// Piecewise-constant value at time t (right-continuous).
    double utility_at(Seconds t) const;
};

/// Runs the feedback loop against `trace` on a model built from config.shops and config.seed.
SimulationTimeline run_simulation(const SimulationConfig& config, const FailureTrace& trace);

/// Same, starting from a given model.
SimulationTimeline run_simulation(const SimulationConfig& config, const FailureTrace& trace,
                                  ArchitectureModel model);

/// Exact integral of the piecewise-constant utility over [t0, t1]; the last
/// value extends past the final breakpoint.
double reward(const SimulationTimeline& timeline, Seconds t0, Seconds t1);

struct TimingStats {
    double mean = 0.0;    // seconds
    double stddev = 0.0;  // seconds
    std::size_t repetitions = 0;
};

/// Wall-clock timing of one planning phase (analysis of `changes` into fresh
/// annotations plus planning). Repeats up to `repetitions` times and stops
/// early once stddev/mean < 5% after at least 30 repetitions.
TimingStats measure_planning_time(PlannerKind planner, std::span<const ChangeEvent> changes,
                                  const ArchitectureModel& model, std::size_t repetitions,
                                  std::size_t k = 100, const OracleOptions& oracle = {});

void write_timeline_csv(std::ostream& out, const SimulationTimeline& timeline);
void write_runs_csv(std::ostream& out, const SimulationTimeline& timeline);

}  // namespace selfheal
