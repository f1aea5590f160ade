#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "selfheal/failure_profiles.hpp"
#include "selfheal/sim_engine.hpp"

namespace selfheal {

using Notice = std::function<void(const std::string&)>;

// ---------------------------------------------------------------- scalability

struct ScalabilityRow {
    PlannerKind planner = PlannerKind::UDriven;
    std::size_t components = 0;
    std::size_t fgs = 0;
    /// Failures actually injected; capped by the number of eligible targets.
    std::size_t injected = 0;
    double mean_ms = 0.0;
    double stddev_ms = 0.0;
    std::size_t repetitions = 0;
};

struct ScalabilitySpec {
    std::vector<std::size_t> shops = {1, 10, 100, 1000};
    std::vector<std::size_t> fgs = {1, 10, 100, 1000};
    std::vector<PlannerKind> planners = {PlannerKind::Static, PlannerKind::UDriven,
                                         PlannerKind::Oracle};
    std::size_t repetitions = 300;
    /// Repetition cap for the oracle; its large cells take seconds each.
    std::size_t oracle_repetitions = 30;
    std::size_t k = 100;
    OracleOptions oracle{OracleMode::Search, 6};
    std::uint64_t seed = 1;
};

/// One row per populated (planner, size, FGS) cell; FGS above ten times the
/// component count is skipped with a notice.
std::vector<ScalabilityRow> run_scalability(const ScalabilitySpec& spec, const Notice& notice = {});

/// The change events of `fgs` failures injected at once into `model`.
std::vector<ChangeEvent> inject_failure_group(ArchitectureModel& model, std::size_t fgs,
                                              std::uint64_t seed);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);
/// Slope of the least-squares line through (log x, log y).
double loglog_slope(std::span<const double> x, std::span<const double> y);

void write_scalability_csv(std::ostream& out, std::span<const ScalabilityRow> rows);

// --------------------------------------------------------------------- reward

struct RewardRow {
    std::string trace;
    PlannerKind planner = PlannerKind::UDriven;
    std::uint64_t seed = 0;
    double likelihood = 1.0;
    double reward = 0.0;
    double initial_utility = 0.0;
    double final_utility = 0.0;
    std::size_t runs = 0;
    std::size_t unresolved = 0;
};

struct RewardJob {
    std::string trace_name;
    const FailureTrace* trace = nullptr;
    SimulationConfig config;
};

/// Runs the jobs on a bounded worker pool; rows come back in job order.
/// Timelines are kept when `timelines` is non-null.
std::vector<RewardRow> run_reward_jobs(std::span<const RewardJob> jobs, std::size_t workers = 0,
                                       std::vector<SimulationTimeline>* timelines = nullptr);

void write_reward_csv(std::ostream& out, std::span<const RewardRow> rows);

/// Named short traces: grid5000 (pinned base), lri, deug, uniform, single,
/// bigburst (derived from the pinned base), or synthetic-<fgs>.
FailureTrace named_trace(const std::string& name, std::uint64_t seed);

// ----------------------------------------------------------------- analytical

struct AnalyticalRun {
    PlannerKind planner = PlannerKind::UDriven;
    SimulationTimeline timeline;
};

struct AnalyticalResult {
    std::string id;
    Seconds window = 0.0;
    std::vector<AnalyticalRun> runs;
    /// Structural expectations that did not hold; empty when the scenario reproduces.
    std::vector<std::string> violations;

    const SimulationTimeline& timeline(PlannerKind planner) const;
};

/// Pinned scenarios fig10a, fig10b, fig11, fig14 on 100 shops.
AnalyticalResult run_analytical(const std::string& id);

}  // namespace selfheal
