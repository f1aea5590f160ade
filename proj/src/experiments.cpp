#include "selfheal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace selfheal {

// ---------------------------------------------------------------- scalability

std::vector<ChangeEvent> inject_failure_group(ArchitectureModel& model, std::size_t fgs,
                                              std::uint64_t seed) {
    const FailureTrace group = generate_synthetic(fgs, 1, 1.0, seed);
    std::vector<ChangeEvent> changes;
    for (const TraceEntry& entry : group.entries) {
        const auto target = model.select_target(entry.kind, entry.selector);
        if (!target) continue;
        auto events = model.inject_failure(entry.kind, *target, 0.0);
        changes.insert(changes.end(), events.begin(), events.end());
    }
    return changes;
}

std::vector<ScalabilityRow> run_scalability(const ScalabilitySpec& spec, const Notice& notice) {
    std::vector<ScalabilityRow> rows;
    for (std::size_t shops : spec.shops) {
        const std::size_t components = shops * kSlotsPerShop;
        for (std::size_t fgs : spec.fgs) {
            if (fgs > 10 * components) {
                if (notice) {
                    notice("skipping FGS " + std::to_string(fgs) + " on " +
                           std::to_string(components) + " components");
                }
                continue;
            }
            ArchitectureModel model = build_architecture(shops, spec.seed);
            const auto changes = inject_failure_group(model, fgs, spec.seed);
            const std::size_t injected = issue_oracle(model).size();
            for (PlannerKind planner : spec.planners) {
                const std::size_t reps =
                    planner == PlannerKind::Oracle ? spec.oracle_repetitions : spec.repetitions;
                const TimingStats stats =
                    measure_planning_time(planner, changes, model, reps, spec.k, spec.oracle);
                rows.push_back({planner, components, fgs, injected, stats.mean * 1e3,
                                stats.stddev * 1e3, stats.repetitions});
            }
        }
    }
    return rows;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return cov * cov / (vx * vy);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

void write_scalability_csv(std::ostream& out, std::span<const ScalabilityRow> rows) {
    out << "planner,components,fgs,injected,mean_ms,stddev_ms,reps\n";
    char buf[160];
    for (const ScalabilityRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6f,%.6f,%zu\n",
                      std::string(to_string(r.planner)).c_str(), r.components, r.fgs, r.injected,
                      r.mean_ms, r.stddev_ms, r.repetitions);
        out << buf;
    }
}

// --------------------------------------------------------------------- reward

std::vector<RewardRow> run_reward_jobs(std::span<const RewardJob> jobs, std::size_t workers,
                                       std::vector<SimulationTimeline>* timelines) {
    std::vector<RewardRow> rows(jobs.size());
    if (timelines) timelines->assign(jobs.size(), {});
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size() && !failed; i = next++) {
            try {
                const RewardJob& job = jobs[i];
                SimulationConfig config = job.config;
                if (config.horizon <= 0.0) config.horizon = job.trace->duration;
                SimulationTimeline timeline = run_simulation(config, *job.trace);
                RewardRow& row = rows[i];
                row.trace = job.trace_name;
                row.planner = config.planner;
                row.seed = config.seed;
                row.likelihood = config.rule_success_likelihood;
                row.reward = reward(timeline, 0.0, timeline.end);
                row.initial_utility = timeline.initial_utility();
                row.final_utility = timeline.final_utility();
                row.runs = timeline.runs.size();
                row.unresolved = timeline.unresolved;
                if (timelines) (*timelines)[i] = std::move(timeline);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

void write_reward_csv(std::ostream& out, std::span<const RewardRow> rows) {
    out << "trace,planner,seed,likelihood,reward,initial_utility,final_utility,runs,unresolved\n";
    char buf[256];
    for (const RewardRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%llu,%.4f,%.6f,%.6f,%.6f,%zu,%zu\n", r.trace.c_str(),
                      std::string(to_string(r.planner)).c_str(),
                      static_cast<unsigned long long>(r.seed), r.likelihood, r.reward,
                      r.initial_utility, r.final_utility, r.runs, r.unresolved);
        out << buf;
    }
}

FailureTrace named_trace(const std::string& name, std::uint64_t seed) {
    if (name.starts_with("synthetic-")) {
        const std::size_t fgs = std::stoul(name.substr(10));
        return generate_synthetic(fgs, 50, 1728.0, seed);
    }
    if (name == "grid5000") return grid5000_base_trace();
    if (name == "uniform") return generate_realistic(derive_uniform_variant(grid5000_base_trace(), seed), seed);
    if (name == "single") return generate_realistic(derive_single_variant(grid5000_base_trace()), seed);
    if (name == "bigburst") {
        return generate_realistic(derive_bigburst_variant(grid5000_base_trace(), seed), seed);
    }
    if (name.ends_with("-long")) {
        return generate_realistic(profile_model(name.substr(0, name.size() - 5), TraceLength::Long), seed);
    }
    return generate_realistic(profile_model(name), seed);
}

// ----------------------------------------------------------------- analytical

const SimulationTimeline& AnalyticalResult::timeline(PlannerKind planner) const {
    for (const AnalyticalRun& run : runs) {
        if (run.planner == planner) return run.timeline;
    }
    throw Error("scenario has no run for planner " + std::string(to_string(planner)));
}

namespace {

constexpr std::size_t kScenarioShops = 100;
constexpr std::uint64_t kScenarioSeed = 1;
constexpr Seconds kScenarioWindow = 60.0;

struct Pin {
    ShopId shop;
    std::uint8_t slot;
    double criticality;
    std::array<double, 3> alternatives;
    std::uint8_t current;
};

ComponentId pin(ArchitectureModel& model, const Pin& p) {
    const auto types = model.alternatives(p.slot);
    for (std::size_t a = 0; a < types.size(); ++a) model.set_reliability(types[a], p.alternatives[a]);
    const ComponentId id = model.shop(p.shop).slots[p.slot];
    model.set_component_type(id, types[p.current]);
    model.set_criticality(id, p.criticality);
    return id;
}

std::uint8_t slot_with_degree(const ArchitectureModel& model, std::size_t degree,
                              std::uint8_t not_this = 255) {
    const Shop& shop = model.shop(0);
    for (std::uint8_t s = 0; s < kSlotsPerShop; ++s) {
        if (s != not_this && model.component(shop.slots[s]).connectivity() == degree) return s;
    }
    throw Error("no slot with connectivity " + std::to_string(degree));
}

TraceEntry pinned(Seconds t, FailureKind kind, ComponentId id) {
    return {t, kind, 0, ElementRef::component(id)};
}

struct Fig10 {
    ArchitectureModel model;
    FailureTrace trace;
};

// Three failures at t=0 on shop 0. With `better_type`, the removed component
// has a more reliable alternative type available.
Fig10 fig10_setup(bool better_type) {
    Fig10 s{build_architecture(kScenarioShops, kScenarioSeed), {}};
    const std::uint8_t a = slot_with_degree(s.model, 6);
    const std::uint8_t b = slot_with_degree(s.model, 5);
    const std::uint8_t c = slot_with_degree(s.model, 2);
    ComponentId removed, failing, crashed;
    if (better_type) {
        removed = pin(s.model, {0, a, 10, {0.5, 0.75, 1.0}, 0});  // u1 30, best alternative 60
        failing = pin(s.model, {0, b, 6, {0.5, 0.5, 0.5}, 0});    // u1 15
    } else {
        removed = pin(s.model, {0, a, 10, {0.5, 0.5, 0.5}, 0});   // u1 30
        failing = pin(s.model, {0, b, 6, {1.0, 1.0, 1.0}, 0});    // u1 30
    }
    crashed = pin(s.model, {0, c, 2, {1.0, 1.0, 1.0}, 0});        // u1 4
    s.trace.model = better_type ? "fig10a" : "fig10b";
    s.trace.duration = kScenarioWindow;
    s.trace.entries = {pinned(0.0, FailureKind::CF1, crashed), pinned(0.0, FailureKind::CF2, failing),
                       pinned(0.0, FailureKind::CF3, removed)};
    return s;
}

SimulationTimeline simulate(PlannerKind planner, const ArchitectureModel& model,
                            const FailureTrace& trace) {
    SimulationConfig config;
    config.shops = kScenarioShops;
    config.planner = planner;
    config.seed = kScenarioSeed;
    config.planning_time_mode = PlanningTimeMode::Calibrated;
    config.horizon = kScenarioWindow;
    return run_simulation(config, trace, model);
}

std::vector<FailureKind> failure_order(const SimulationTimeline& t, std::size_t run = 0) {
    std::vector<FailureKind> out;
    for (const ExecutedRule& e : t.executed) {
        if (e.run == run) out.push_back(e.failure);
    }
    return out;
}

std::vector<std::string> rule_order(const SimulationTimeline& t, std::size_t run = 0) {
    std::vector<std::string> out;
    for (const ExecutedRule& e : t.executed) {
        if (e.run == run) out.push_back(e.rule);
    }
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : " ") + x;
    return out;
}

Seconds first_run_end(const SimulationTimeline& t) {
    const MapeRunRecord& r = t.runs.at(0);
    return r.trigger + r.analyze + r.plan + r.execute;
}

void expect(AnalyticalResult& result, bool ok, const std::string& what) {
    if (!ok) result.violations.push_back(what);
}

void check_fig10a(AnalyticalResult& r) {
    using enum FailureKind;
    const auto& u = r.timeline(PlannerKind::UDriven);
    const auto& s = r.timeline(PlannerKind::Static);
    expect(r, failure_order(u) == std::vector{CF3, CF2, CF1}, "u-driven order is not CF3, CF2, CF1");
    expect(r, !u.executed.empty() && u.executed.front().rule.starts_with("REPLACE"),
           "u-driven does not replace the removed component");
    expect(r, failure_order(s) == std::vector{CF3, CF1, CF2}, "static order is not CF3, CF1, CF2");
    expect(r, rule_order(s) == std::vector<std::string>{"HW_REDEPLOY", "LW_REDEPLOY", "RESTART"},
           "static rules are " + join(rule_order(s)));
    expect(r, u.final_utility() > s.final_utility(), "u-driven does not reach a higher utility");
    expect(r, s.final_utility() == s.initial_utility(), "static does not restore the initial utility");
    // The heavy-weight redeployment finishes before the replacement does.
    const Seconds static_first = s.executed.at(0).end;
    const Seconds udriven_first = u.executed.at(0).end;
    expect(r, static_first < udriven_first, "static's first repair does not complete first");
    const Seconds between = 0.5 * (static_first + udriven_first);
    expect(r, s.utility_at(between) > u.utility_at(between),
           "static is not ahead while the replacement runs");
    expect(r, reward(u, 0.0, r.window) > reward(s, 0.0, r.window), "u-driven reward not above static");
}

void check_fig10b(AnalyticalResult& r) {
    using enum FailureKind;
    const auto& u = r.timeline(PlannerKind::UDriven);
    const auto& s = r.timeline(PlannerKind::Static);
    expect(r, failure_order(u) == std::vector{CF2, CF3, CF1}, "u-driven order is not CF2, CF3, CF1");
    expect(r, rule_order(u) == std::vector<std::string>{"RESTART", "HW_REDEPLOY", "RESTART"},
           "u-driven rules are " + join(rule_order(u)));
    expect(r, failure_order(s) == std::vector{CF3, CF1, CF2}, "static order is not CF3, CF1, CF2");
    expect(r, u.final_utility() == s.final_utility(), "final utilities differ");
    expect(r, u.final_utility() == u.initial_utility(), "initial utility not restored");
    expect(r, u.executed.at(0).end < s.executed.at(0).end, "u-driven does not recover first");
    expect(r, reward(u, 0.0, r.window) > reward(s, 0.0, r.window), "u-driven reward not above static");
}

void check_fig11(AnalyticalResult& r) {
    const auto& u = r.timeline(PlannerKind::UDriven);
    const auto& o = r.timeline(PlannerKind::Oracle);
    expect(r, rule_order(u) == rule_order(o) && failure_order(u) == failure_order(o),
           "oracle plan differs from u-driven");
    expect(r, !o.executed.empty() && !u.executed.empty() && o.executed[0].start > u.executed[0].start,
           "oracle execution is not delayed");
    expect(r, o.final_utility() == u.final_utility(), "final utilities differ");
    expect(r, reward(u, 0.0, r.window) > reward(o, 0.0, r.window), "u-driven reward not above oracle");
}

void check_fig14(AnalyticalResult& r, Seconds second_group) {
    const auto& u = r.timeline(PlannerKind::UDriven);
    const auto& o = r.timeline(PlannerKind::Oracle);
    auto run_at = [](const SimulationTimeline& t, Seconds time) {
        return std::any_of(t.runs.begin(), t.runs.end(),
                           [&](const MapeRunRecord& rec) { return rec.trigger == time && rec.issues > 0; });
    };
    expect(r, first_run_end(u) < second_group && second_group < first_run_end(o),
           "second group does not fall between the first-run ends");
    expect(r, run_at(u, second_group), "u-driven does not react to the second group on arrival");
    expect(r, !run_at(o, second_group), "oracle reacts to the second group on arrival");
    expect(r, o.runs.size() > 1 && o.runs[1].trigger == first_run_end(o) && o.runs[1].issues > 0,
           "oracle does not pick the second group up after its first run");
    expect(r, reward(u, 0.0, r.window) > reward(o, 0.0, r.window), "u-driven reward not above oracle");
}

}  // namespace

AnalyticalResult run_analytical(const std::string& id) {
    AnalyticalResult result;
    result.id = id;
    result.window = kScenarioWindow;
    const std::vector<PlannerKind> planners = {PlannerKind::Static, PlannerKind::UDriven,
                                               PlannerKind::Oracle};

    if (id == "fig10a" || id == "fig10b" || id == "fig11") {
        const Fig10 s = fig10_setup(id == "fig10a");
        for (PlannerKind p : planners) result.runs.push_back({p, simulate(p, s.model, s.trace)});
        if (id == "fig10a") check_fig10a(result);
        else if (id == "fig10b") check_fig10b(result);
        else check_fig11(result);
        return result;
    }
    if (id == "fig14") {
        ArchitectureModel model = build_architecture(kScenarioShops, kScenarioSeed);
        const std::uint8_t a = slot_with_degree(model, 6);
        const std::uint8_t b = slot_with_degree(model, 5);
        const std::uint8_t c = slot_with_degree(model, 2);
        FailureTrace trace;
        trace.model = "fig14";
        trace.duration = kScenarioWindow;
        for (ShopId shop : {ShopId{0}, ShopId{1}}) {
            for (std::uint8_t slot : {a, b, c}) pin(model, {shop, slot, 5, {0.75, 0.75, 0.75}, 0});
        }
        for (std::uint8_t slot : {a, b, c}) {
            trace.entries.push_back(pinned(0.0, FailureKind::CF2, model.shop(0).slots[slot]));
        }
        const Seconds u_end = first_run_end(simulate(PlannerKind::UDriven, model, trace));
        const Seconds o_end = first_run_end(simulate(PlannerKind::Oracle, model, trace));
        const Seconds second = 0.5 * (u_end + o_end);
        for (std::uint8_t slot : {a, b, c}) {
            trace.entries.push_back(pinned(second, FailureKind::CF2, model.shop(1).slots[slot]));
        }
        for (PlannerKind p : planners) result.runs.push_back({p, simulate(p, model, trace)});
        check_fig14(result, second);
        return result;
    }
    throw Error("unknown analytical scenario: " + id);
}

}  // namespace selfheal
