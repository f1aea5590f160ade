// selfheal: experiment driver for the self-healing simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "selfheal/experiments.hpp"
#include "selfheal/validation.hpp"

namespace fs = std::filesystem;
using namespace selfheal;

namespace {

struct Options {
    // shared
    std::uint64_t seed = 1;
    std::string out;
    // gen-trace
    std::string model;
    std::string variant = "short";
    std::size_t fgs = 10;
    std::size_t runs = 50;
    double iat = 1728.0;
    // scalability / reward
    std::vector<std::string> planners;
    std::vector<std::size_t> shops;
    std::vector<std::size_t> fgs_list;
    std::size_t reps = 300;
    std::size_t oracle_reps = 30;
    std::size_t k = 100;
    std::vector<double> likelihoods;
    std::string planning_time_mode = "calibrated";
    std::vector<std::string> traces;
    std::size_t seeds = 1;
    bool timelines = false;
    // analytical
    std::string scenario;
};

// Appends `--key=value` for every config entry whose flag is not already given.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config = args[++i];
        } else if (args[i].starts_with("--config=")) {
            config = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (config.empty()) return out;
    std::ifstream in(config);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + config);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string flag = "--" + key;
        const bool given = std::any_of(out.begin(), out.end(), [&](const std::string& a) {
            return a == flag || a.starts_with(flag + "=");
        });
        if (!given) out.push_back(flag + "=" + value);
    }
    return out;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file.open(path);
    if (!file) throw Error("cannot write " + path);
    return file;
}

std::vector<PlannerKind> parse_planners(const std::vector<std::string>& names) {
    std::vector<PlannerKind> out;
    for (const auto& n : names) out.push_back(planner_from_string(n));
    if (out.empty()) out = {PlannerKind::Static, PlannerKind::UDriven, PlannerKind::Oracle};
    return out;
}

int cmd_gen_trace(const Options& o) {
    FailureTrace trace;
    if (o.model == "synthetic") {
        trace = generate_synthetic(o.fgs, o.runs, o.iat, o.seed);
    } else if (o.model == "uniform" || o.model == "single" || o.model == "bigburst") {
        trace = named_trace(o.model, o.seed);
    } else {
        const TraceLength length = o.variant == "long" ? TraceLength::Long : TraceLength::Short;
        if (o.variant != "short" && o.variant != "long") throw Error("variant must be short or long");
        trace = o.model == "grid5000" && length == TraceLength::Short && o.seed == kGrid5000ShortSeed
                    ? grid5000_base_trace()
                    : generate_realistic(profile_model(o.model, length), o.seed);
    }
    std::ofstream file;
    write_trace(open_out(o.out, file), trace);
    std::cerr << "wrote " << trace.density() << " failures in " << trace.bursts << " bursts\n";
    return 0;
}

int cmd_scalability(const Options& o) {
    ScalabilitySpec spec;
    if (!o.shops.empty()) spec.shops = o.shops;
    if (!o.fgs_list.empty()) spec.fgs = o.fgs_list;
    spec.planners = parse_planners(o.planners);
    spec.repetitions = o.reps;
    spec.oracle_repetitions = std::min(o.reps, o.oracle_reps);
    spec.k = o.k;
    spec.seed = o.seed;
    const auto rows = run_scalability(spec, [](const std::string& msg) { std::cerr << msg << '\n'; });
    std::ofstream file;
    write_scalability_csv(open_out(o.out, file), rows);
    return 0;
}

int cmd_reward(const Options& o) {
    const auto planners = parse_planners(o.planners);
    const std::vector<double> likelihoods = o.likelihoods.empty() ? std::vector{1.0} : o.likelihoods;
    const std::vector<std::string> names = o.traces.empty() ? std::vector<std::string>{"grid5000"} : o.traces;
    const PlanningTimeMode mode = planning_time_mode_from_string(o.planning_time_mode);

    std::vector<std::pair<std::string, FailureTrace>> traces;
    for (const auto& name : names) {
        if (fs::exists(name)) traces.emplace_back(fs::path(name).stem().string(), load_trace(name));
        else traces.emplace_back(name, named_trace(name, o.seed));
    }
    std::vector<RewardJob> jobs;
    for (const auto& [name, trace] : traces) {
        for (double likelihood : likelihoods) {
            for (PlannerKind planner : planners) {
                for (std::size_t s = 0; s < o.seeds; ++s) {
                    RewardJob job{name, &trace, {}};
                    job.config.shops = o.shops.empty() ? 100 : o.shops.front();
                    job.config.planner = planner;
                    job.config.k = o.k;
                    job.config.rule_success_likelihood = likelihood;
                    job.config.seed = o.seed + s;
                    job.config.planning_time_mode = mode;
                    jobs.push_back(job);
                }
            }
        }
    }
    std::vector<SimulationTimeline> timelines;
    const auto rows = run_reward_jobs(jobs, 0, o.timelines ? &timelines : nullptr);

    if (o.out.empty()) {
        write_reward_csv(std::cout, rows);
        return 0;
    }
    fs::create_directories(o.out);
    std::ofstream csv(fs::path(o.out) / "rewards.csv");
    write_reward_csv(csv, rows);
    for (std::size_t i = 0; i < timelines.size(); ++i) {
        const RewardRow& r = rows[i];
        const std::string stem = r.trace + "_" + std::string(to_string(r.planner)) + "_s" +
                                 std::to_string(r.seed) + "_l" +
                                 std::to_string(static_cast<int>(r.likelihood * 100));
        std::ofstream tl(fs::path(o.out) / (stem + "_timeline.csv"));
        write_timeline_csv(tl, timelines[i]);
        std::ofstream runs(fs::path(o.out) / (stem + "_runs.csv"));
        write_runs_csv(runs, timelines[i]);
    }
    return 0;
}

int cmd_analytical(const Options& o) {
    const std::vector<std::string> ids =
        o.scenario == "all" ? std::vector<std::string>{"fig10a", "fig10b", "fig11", "fig14"}
                            : std::vector<std::string>{o.scenario};
    bool ok = true;
    for (const auto& id : ids) {
        const AnalyticalResult result = run_analytical(id);
        for (const AnalyticalRun& run : result.runs) {
            std::cout << id << ' ' << to_string(run.planner) << " reward "
                      << reward(run.timeline, 0.0, result.window) << " final "
                      << run.timeline.final_utility() << '\n';
            if (!o.out.empty()) {
                fs::create_directories(o.out);
                std::ofstream tl(fs::path(o.out) / (id + "_" + std::string(to_string(run.planner)) + ".csv"));
                write_timeline_csv(tl, run.timeline);
            }
        }
        for (const auto& v : result.violations) std::cout << id << " violation: " << v << '\n';
        ok = ok && result.violations.empty();
    }
    return ok ? 0 : 2;
}

int cmd_validate_rules() {
    const RuleSetReport report = validate_rule_set(default_rule_set());
    for (const auto& v : report.violations) {
        std::cout << v.rule << ' ' << v.assumption << ": " << v.detail << '\n';
    }
    std::cout << report.checks << " rule applications checked, " << report.violations.size()
              << " violations\n";
    return report.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Self-healing simulator and experiment driver"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-trace", "Generate a failure trace");
    gen->add_option("model", o.model, "synthetic|lri|deug|grid5000|uniform|single|bigburst")
        ->required()
        ->check(CLI::IsMember({"synthetic", "lri", "deug", "grid5000", "uniform", "single", "bigburst"}));
    gen->add_option("--variant", o.variant, "short or long trace");
    gen->add_option("--fgs", o.fgs, "synthetic failure group size")->check(CLI::PositiveNumber);
    gen->add_option("--runs", o.runs, "synthetic number of groups")->check(CLI::PositiveNumber);
    gen->add_option("--iat", o.iat, "synthetic inter-arrival time (s)")->check(CLI::PositiveNumber);
    gen->add_option("--seed", o.seed, "generator seed");
    gen->add_option("--out", o.out, "output file (stdout if omitted)");

    auto* scal = app.add_subcommand("scalability", "Planning-time grid");
    scal->add_option("--planner", o.planners, "planners to time")->delimiter(',');
    scal->add_option("--shops", o.shops, "architecture sizes in shops")->delimiter(',');
    scal->add_option("--fgs", o.fgs_list, "failure group sizes")->delimiter(',');
    scal->add_option("--reps", o.reps, "maximum repetitions per cell")->check(CLI::PositiveNumber);
    scal->add_option("--oracle-reps", o.oracle_reps, "maximum repetitions per oracle cell")
        ->check(CLI::PositiveNumber);
    scal->add_option("--k", o.k, "rule executions per run")->check(CLI::PositiveNumber);
    scal->add_option("--seed", o.seed, "architecture and failure seed");
    scal->add_option("--out", o.out, "output CSV (stdout if omitted)");

    auto* rew = app.add_subcommand("reward", "Simulate traces and integrate reward");
    rew->add_option("--planner", o.planners, "planners to simulate")->delimiter(',');
    rew->add_option("--trace", o.traces, "trace file or name (grid5000, uniform, synthetic-100, ...)")
        ->delimiter(',');
    rew->add_option("--shops", o.shops, "architecture size in shops");
    rew->add_option("--seed", o.seed, "first simulation seed");
    rew->add_option("--seeds", o.seeds, "number of seeds")->check(CLI::PositiveNumber);
    rew->add_option("--k", o.k, "rule executions per run")->check(CLI::PositiveNumber);
    rew->add_option("--likelihood", o.likelihoods, "rule success likelihoods")
        ->delimiter(',')
        ->check(CLI::Range(1e-9, 1.0));
    rew->add_option("--planning-time-mode", o.planning_time_mode, "measured or calibrated")
        ->check(CLI::IsMember({"measured", "calibrated"}));
    rew->add_flag("--timelines", o.timelines, "also write per-simulation timelines");
    rew->add_option("--out", o.out, "output directory (CSV to stdout if omitted)");

    auto* ana = app.add_subcommand("analytical", "Pinned three-failure scenarios");
    ana->add_option("scenario", o.scenario, "fig10a|fig10b|fig11|fig14|all")
        ->required()
        ->check(CLI::IsMember({"fig10a", "fig10b", "fig11", "fig14", "all"}));
    ana->add_option("--out", o.out, "directory for timeline CSVs");

    auto* val = app.add_subcommand("validate-rules", "Check the shipped rule set");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_trace(o);
        if (scal->parsed()) return cmd_scalability(o);
        if (rew->parsed()) return cmd_reward(o);
        if (ana->parsed()) return cmd_analytical(o);
        if (val->parsed()) return cmd_validate_rules();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
