#include "selfheal/sim_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "selfheal/random.hpp"

namespace selfheal {

std::string_view to_string(PlanningTimeMode mode) {
    return mode == PlanningTimeMode::Measured ? "measured" : "calibrated";
}

PlanningTimeMode planning_time_mode_from_string(std::string_view text) {
    if (text == "measured") return PlanningTimeMode::Measured;
    if (text == "calibrated") return PlanningTimeMode::Calibrated;
    throw Error("unknown planning-time mode: " + std::string(text));
}

double SimulationTimeline::utility_at(Seconds t) const {
    if (breakpoints.empty()) return 0.0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](Seconds value, const Breakpoint& b) { return value < b.time; });
    if (it == breakpoints.begin()) return breakpoints.front().utility;
    return std::prev(it)->utility;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
}

Plan dispatch_plan(PlannerKind planner, Annotations& annotations, const ArchitectureModel& model,
                   const RuleSet& rules, const StaticPolicy& policy, const OracleOptions& oracle) {
    switch (planner) {
        case PlannerKind::Static: return plan_static(annotations, model, rules, policy);
        case PlannerKind::UDriven: return plan_udriven(annotations, model, rules);
        case PlannerKind::Oracle: return plan_oracle(annotations, model, rules, oracle);
    }
    return {};
}

class Simulation {
public:
    Simulation(const SimulationConfig& config, const FailureTrace& trace, ArchitectureModel model)
        : config_(config),
          trace_(trace),
          model_(std::move(model)),
          ledger_(model_),
          annotations_(config.k),
          rules_(default_rule_set(config.rule_costs)),
          policy_(StaticPolicy::for_model(model_)),
          rng_(mix64(config.seed ^ 0x5eed0f5e1f4ea1ULL)) {
        if (!(config.rule_success_likelihood > 0.0 && config.rule_success_likelihood <= 1.0)) {
            throw Error("rule success likelihood must lie in (0, 1]");
        }
        for (RuleTemplate& rule : rules_) rule.success_likelihood = config.rule_success_likelihood;
        oracle_.exhaustive_limit = config.oracle_exhaustive_limit;
        oracle_.mode = config.oracle_mode.value_or(
            config.planning_time_mode == PlanningTimeMode::Calibrated ? OracleMode::Calibrated
                                                                      : OracleMode::Search);
        timeline_.breakpoints.push_back({0.0, ledger_.total()});
    }

    SimulationTimeline run() {
        Seconds now = 0.0;
        bool stuck = false;
        while (true) {
            if (pending_.empty() && (annotations_.issues().empty() || stuck)) {
                if (next_ == trace_.entries.size()) break;
                now = std::max(now, trace_.entries[next_].time);
                inject_through(now);
                if (pending_.empty()) continue;
            }
            const std::size_t executed_before = timeline_.executed.size();
            now = mape_run(now);
            stuck = timeline_.executed.size() == executed_before && pending_.empty();
        }
        timeline_.unresolved = issue_oracle(model_).size();
        Seconds last_entry = trace_.entries.empty() ? 0.0 : trace_.entries.back().time;
        timeline_.end = std::max({now, last_entry, config_.horizon, trace_.duration});
        return std::move(timeline_);
    }

private:
    void record(Seconds t, const std::vector<ChangeEvent>& events) {
        ledger_.refresh(model_, touched_anchors(model_, events));
        if (timeline_.breakpoints.size() > 1 && timeline_.breakpoints.back().time == t) {
            timeline_.breakpoints.back().utility = ledger_.total();
        } else {
            timeline_.breakpoints.push_back({t, ledger_.total()});
        }
        if (config_.on_breakpoint) config_.on_breakpoint(t, ledger_.total(), model_);
        pending_.insert(pending_.end(), events.begin(), events.end());
    }

    void inject_through(Seconds t) {
        while (next_ < trace_.entries.size() && trace_.entries[next_].time <= t) {
            const TraceEntry& entry = trace_.entries[next_++];
            std::optional<ElementRef> target;
            if (entry.target) {
                if (model_.is_eligible(entry.kind, *entry.target)) target = entry.target;
            } else {
                target = model_.select_target(entry.kind, entry.selector);
            }
            if (!target) {
                ++timeline_.dropped;
                continue;
            }
            record(entry.time, model_.inject_failure(entry.kind, *target, entry.time));
            ++timeline_.injected;
        }
    }

    Seconds mape_run(Seconds now) {
        MapeRunRecord rec;
        rec.run = timeline_.runs.size();
        rec.trigger = now;
        std::vector<ChangeEvent> changes;
        changes.swap(pending_);
        rec.changes = changes.size();

        const auto t0 = Clock::now();
        analyze(annotations_, changes, model_);
        const auto t1 = Clock::now();
        Plan plan = dispatch_plan(config_.planner, annotations_, model_, rules_, policy_, oracle_);
        const auto t2 = Clock::now();
        rec.issues = annotations_.issues().size();

        if (config_.planning_time_mode == PlanningTimeMode::Calibrated) {
            rec.plan = time_model_.predict(config_.planner, rec.issues, model_.live_component_count());
        } else {
            rec.analyze = elapsed(t0, t1);
            rec.plan = elapsed(t1, t2);
        }
        rec.plan += config_.extra_planning_delay;
        const Seconds exec_start = now + rec.analyze + rec.plan;
        Seconds clock = exec_start;
        for (const RuleMatch& entry : plan.entries) {
            if (!match_at(model_, entry.issue.pattern, entry.issue.anchor)) continue;
            const Seconds done = clock + entry.cost;
            inject_through(done);
            ExecutedRule log{rec.run, clock, done, rules_[entry.rule].name, entry.issue, entry.failure,
                             false};
            if (rng_.bernoulli(rules_[entry.rule].success_likelihood)) {
                record(done, apply_rule(model_, rules_, entry, done));
                log.succeeded = true;
                ++rec.rules_ok;
            } else {
                ++rec.rules_failed;
            }
            timeline_.executed.push_back(std::move(log));
            clock = done;
        }
        inject_through(clock);
        rec.execute = clock - exec_start;
        timeline_.runs.push_back(rec);
        return clock;
    }

    const SimulationConfig& config_;
    const FailureTrace& trace_;
    ArchitectureModel model_;
    UtilityLedger ledger_;
    Annotations annotations_;
    RuleSet rules_;
    StaticPolicy policy_;
    OracleOptions oracle_;
    PlanningTimeModel time_model_;
    Rng rng_;
    std::vector<ChangeEvent> pending_;
    std::size_t next_ = 0;
    SimulationTimeline timeline_;
};

}  // namespace

SimulationTimeline run_simulation(const SimulationConfig& config, const FailureTrace& trace) {
    return run_simulation(config, trace, build_architecture(config.shops, config.seed));
}

SimulationTimeline run_simulation(const SimulationConfig& config, const FailureTrace& trace,
                                  ArchitectureModel model) {
    Simulation sim(config, trace, std::move(model));
    return sim.run();
}

double reward(const SimulationTimeline& timeline, Seconds t0, Seconds t1) {
    if (timeline.breakpoints.empty() || t1 <= t0) return 0.0;
    const auto& bps = timeline.breakpoints;
    double area = 0.0;
    if (t0 < bps.front().time) {
        area += bps.front().utility * (std::min(t1, bps.front().time) - t0);
    }
    for (std::size_t i = 0; i < bps.size(); ++i) {
        const Seconds from = std::max(t0, bps[i].time);
        const Seconds to = i + 1 < bps.size() ? std::min(t1, bps[i + 1].time) : t1;
        if (to > from) area += bps[i].utility * (to - from);
    }
    return area;
}

TimingStats measure_planning_time(PlannerKind planner, std::span<const ChangeEvent> changes,
                                  const ArchitectureModel& model, std::size_t repetitions,
                                  std::size_t k, const OracleOptions& oracle) {
    const RuleSet rules = default_rule_set();
    const StaticPolicy policy = StaticPolicy::for_model(model);
    std::vector<double> samples;
    TimingStats stats;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(repetitions, 1); ++rep) {
        Annotations annotations(k);
        const auto t0 = Clock::now();
        analyze(annotations, changes, model);
        dispatch_plan(planner, annotations, model, rules, policy, oracle);
        samples.push_back(elapsed(t0, Clock::now()));

        const double n = static_cast<double>(samples.size());
        double sum = 0.0;
        for (double s : samples) sum += s;
        stats.mean = sum / n;
        double sq = 0.0;
        for (double s : samples) sq += (s - stats.mean) * (s - stats.mean);
        stats.stddev = samples.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
        stats.repetitions = samples.size();
        if (samples.size() >= 30 && stats.stddev < 0.05 * stats.mean) break;
    }
    return stats;
}

void write_timeline_csv(std::ostream& out, const SimulationTimeline& timeline) {
    out << "time_s,utility\n";
    char buf[96];
    for (const Breakpoint& b : timeline.breakpoints) {
        std::snprintf(buf, sizeof buf, "%.6f,%.10g\n", b.time, b.utility);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.6f,%.10g\n", timeline.end, timeline.final_utility());
    if (timeline.end > timeline.breakpoints.back().time) out << buf;
}

void write_runs_csv(std::ostream& out, const SimulationTimeline& timeline) {
    out << "run,trigger_s,analyze_ms,plan_ms,exec_ms,issues,rules_ok,rules_failed\n";
    char buf[192];
    for (const MapeRunRecord& r : timeline.runs) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%zu,%zu,%zu\n", r.run, r.trigger,
                      r.analyze * 1e3, r.plan * 1e3, r.execute * 1e3, r.issues, r.rules_ok,
                      r.rules_failed);
        out << buf;
    }
}

}  // namespace selfheal
