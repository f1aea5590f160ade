#include "selfheal/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace selfheal {

std::string_view to_string(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::Static: return "static";
        case PlannerKind::UDriven: return "u-driven";
        case PlannerKind::Oracle: return "oracle";
    }
    return "?";
}

PlannerKind planner_from_string(std::string_view text) {
    if (text == "static") return PlannerKind::Static;
    if (text == "u-driven" || text == "udriven") return PlannerKind::UDriven;
    if (text == "oracle" || text == "solver") return PlannerKind::Oracle;
    throw Error("unknown planner: " + std::string(text));
}

namespace {

std::vector<Issue*> issues_in_detection_order(Annotations& annotations) {
    std::vector<Issue*> out;
    out.reserve(annotations.issues().size());
    for (auto& [key, issue] : annotations.issues()) out.push_back(&issue);
    std::sort(out.begin(), out.end(), [](const Issue* a, const Issue* b) { return a->id < b->id; });
    return out;
}

bool better_for_issue(const RuleMatch& candidate, const RuleMatch& current) {
    if (candidate.utility_increase != current.utility_increase) {
        return candidate.utility_increase > current.utility_increase;
    }
    return candidate.ratio > current.ratio;
}

// Drops candidates with the same utility increase as a cheaper one; they can
// never improve either objective.
std::vector<RuleMatch> undominated(std::vector<RuleMatch> candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const RuleMatch& a, const RuleMatch& b) {
        if (a.utility_increase != b.utility_increase) return a.utility_increase > b.utility_increase;
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.rule < b.rule;
    });
    std::vector<RuleMatch> out;
    for (const RuleMatch& c : candidates) {
        if (out.empty() || out.back().utility_increase != c.utility_increase) out.push_back(c);
    }
    return out;
}

void truncate_and_record(Plan& plan, Annotations& annotations) {
    if (plan.entries.size() > annotations.capacity()) plan.entries.resize(annotations.capacity());
    annotations.reset_best_rules();
    for (const RuleMatch& entry : plan.entries) {
        annotations.add_best_rule(entry);
        if (Issue* issue = annotations.find_issue(entry.issue)) issue->handled_by = entry;
    }
}

bool same_value(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<RuleMatch> exhaustive(const std::vector<std::vector<RuleMatch>>& candidates) {
    const std::size_t n = candidates.size();
    std::vector<std::size_t> choice(n, 0);
    std::vector<RuleMatch> current(n);
    std::vector<RuleMatch> best;
    double best_final = -std::numeric_limits<double>::infinity();
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);

    while (true) {
        double final_gain = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            current[i] = candidates[i][choice[i]];
            final_gain += current[i].utility_increase;
        }
        const bool tie = same_value(final_gain, best_final);
        if (final_gain > best_final || tie) {
            if (!tie) {
                best_final = final_gain;
                best_loss = std::numeric_limits<double>::infinity();
            }
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::vector<RuleMatch> sequence(n);
            do {
                for (std::size_t i = 0; i < n; ++i) sequence[i] = current[order[i]];
                const double loss = sequence_loss(sequence);
                if (loss < best_loss && !same_value(loss, best_loss)) {
                    best_loss = loss;
                    best = sequence;
                }
            } while (std::next_permutation(order.begin(), order.end()));
        }
        std::size_t digit = 0;
        while (digit < n && ++choice[digit] == candidates[digit].size()) choice[digit++] = 0;
        if (digit == n) break;
    }
    return best;
}

std::vector<RuleMatch> exchange_search(const std::vector<std::vector<RuleMatch>>& candidates) {
    std::vector<RuleMatch> sequence;
    sequence.reserve(candidates.size());
    for (const auto& options : candidates) sequence.push_back(options.front());

    double loss = sequence_loss(sequence);
    for (std::size_t pass = 0; pass < sequence.size(); ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
            std::swap(sequence[i], sequence[i + 1]);
            const double swapped = sequence_loss(sequence);
            if (swapped < loss && !same_value(swapped, loss)) {
                loss = swapped;
                improved = true;
            } else {
                std::swap(sequence[i], sequence[i + 1]);
            }
        }
        if (!improved) break;
    }
    return sequence;
}

}  // namespace

double sequence_loss(std::span<const RuleMatch> sequence) {
    double clock = 0.0;
    double loss = 0.0;
    for (const RuleMatch& entry : sequence) {
        clock += entry.cost;
        loss += entry.utility_increase * clock;
    }
    return loss;
}

StaticPolicy StaticPolicy::for_model(const ArchitectureModel& model) {
    StaticPolicy policy;
    double sum_u1 = 0.0;
    double sum_conn = 0.0;
    std::size_t live = 0;
    for (const Component& c : model.components()) {
        if (c.retired) continue;
        sum_u1 += c.criticality * model.type(c.type).reliability *
                  static_cast<double>(c.connectivity());
        sum_conn += static_cast<double>(c.connectivity());
        ++live;
    }
    if (live > 0) {
        policy.estimated_u1 = sum_u1 / static_cast<double>(live);
        policy.estimated_connectivity = sum_conn / static_cast<double>(live);
    }
    return policy;
}

Plan plan_udriven(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules) {
    Plan plan;
    plan.planner = PlannerKind::UDriven;
    annotations.reset_best_rules();
    for (auto& [key, issue] : annotations.issues()) {
        issue.handled_by.reset();
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (!rules[r].applies_to(issue.failure)) continue;
            RuleMatch candidate = instantiate_rule(model, rules, r, key, issue.failure);
            ++plan.rule_instantiations;
            if (!issue.handled_by || better_for_issue(candidate, *issue.handled_by)) {
                issue.handled_by = candidate;
            }
        }
        if (issue.handled_by) annotations.add_best_rule(*issue.handled_by);
    }
    plan.entries = annotations.best_rules();
    return plan;
}

Plan plan_static(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules,
                 const StaticPolicy& policy) {
    Plan plan;
    plan.planner = PlannerKind::Static;

    std::array<std::size_t, 4> rule_index{};
    for (std::size_t f = 0; f < 4; ++f) {
        auto it = std::find_if(rules.begin(), rules.end(),
                               [&](const RuleTemplate& r) { return r.name == policy.rule_for[f]; });
        if (it == rules.end()) throw Error("static policy names a missing rule");
        rule_index[f] = static_cast<std::size_t>(it - rules.begin());
    }
    std::array<std::size_t, 4> rank{};
    for (std::size_t i = 0; i < 4; ++i) rank[static_cast<std::size_t>(policy.order[i])] = i;

    auto issues = issues_in_detection_order(annotations);
    std::stable_sort(issues.begin(), issues.end(), [&](const Issue* a, const Issue* b) {
        return rank[static_cast<std::size_t>(a->failure)] < rank[static_cast<std::size_t>(b->failure)];
    });

    for (Issue* issue : issues) {
        issue->handled_by.reset();
        if (plan.entries.size() >= annotations.capacity()) continue;
        const std::size_t f = static_cast<std::size_t>(issue->failure);
        const RuleTemplate& rule = rules[rule_index[f]];
        RuleMatch entry;
        entry.rule = rule_index[f];
        entry.kind = rule.kind;
        entry.issue = issue->key();
        entry.failure = issue->failure;
        entry.action = make_action(model, rule, entry.issue);
        switch (issue->failure) {
            case FailureKind::CF2: entry.utility_increase = policy.estimated_u1; break;
            case FailureKind::CF4:
                entry.utility_increase = policy.estimated_u1 / std::max(1.0, policy.estimated_connectivity);
                break;
            default: entry.utility_increase = 2.0 * policy.estimated_u1; break;
        }
        entry.cost = rule.cost;
        entry.ratio = entry.utility_increase / entry.cost;
        ++plan.rule_instantiations;
        issue->handled_by = entry;
        plan.entries.push_back(entry);
    }
    return plan;
}

Plan plan_oracle(Annotations& annotations, const ArchitectureModel& model, const RuleSet& rules,
                 const OracleOptions& options) {
    Plan plan;
    plan.planner = PlannerKind::Oracle;
    auto issues = issues_in_detection_order(annotations);
    if (options.mode == OracleMode::Exhaustive && issues.size() > options.exhaustive_limit) {
        throw OracleTooLarge("oracle enumeration over " + std::to_string(issues.size()) +
                             " issues exceeds the limit of " +
                             std::to_string(options.exhaustive_limit));
    }

    std::vector<std::vector<RuleMatch>> candidates;
    candidates.reserve(issues.size());
    for (Issue* issue : issues) {
        issue->handled_by.reset();
        std::vector<RuleMatch> options_for_issue;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (!rules[r].applies_to(issue->failure)) continue;
            options_for_issue.push_back(instantiate_rule(model, rules, r, issue->key(), issue->failure));
            ++plan.rule_instantiations;
        }
        if (!options_for_issue.empty()) candidates.push_back(undominated(std::move(options_for_issue)));
    }

    if (candidates.size() <= options.exhaustive_limit) {
        plan.entries = exhaustive(candidates);
    } else if (options.mode == OracleMode::Search) {
        plan.entries = exchange_search(candidates);
    } else {
        for (const auto& c : candidates) plan.entries.push_back(c.front());
        std::sort(plan.entries.begin(), plan.entries.end(), higher_priority);
    }
    truncate_and_record(plan, annotations);
    return plan;
}

namespace {

// Reference planning times in ms; rows by component count, columns by the
// number of simultaneous issues (1, 10, 100, 1000). NaN marks a missing cell.
constexpr double kNa = std::numeric_limits<double>::quiet_NaN();
constexpr std::array<double, 4> kRowComponents = {18, 180, 1800, 18000};
constexpr std::array<double, 4> kColumnIssues = {1, 10, 100, 1000};
using Table = std::array<std::array<double, 4>, 4>;
constexpr Table kStaticMs = {{{0.76, 10.37, kNa, kNa},
                              {0.68, 9.71, 14.22, kNa},
                              {0.61, 10.60, 13.82, 54.50},
                              {0.65, 10.14, 21.80, 127.80}}};
constexpr Table kUDrivenMs = {{{0.89, 14.36, kNa, kNa},
                               {0.89, 13.58, 17.70, kNa},
                               {0.74, 13.47, 26.65, 60.09},
                               {0.71, 13.87, 26.38, 171.31}}};
constexpr Table kOracleMs = {{{5.02, 55.68, kNa, kNa},
                              {5.01, 59.07, 219.54, kNa},
                              {4.83, 58.24, 211.09, 3216.60},
                              {4.90, 71.93, 271.51, 3611.95}}};

}  // namespace

Seconds PlanningTimeModel::predict(PlannerKind planner, std::size_t issues,
                                   std::size_t components) const {
    if (issues == 0) return 0.0;
    const Table& table = planner == PlannerKind::Static    ? kStaticMs
                         : planner == PlannerKind::UDriven ? kUDrivenMs
                                                           : kOracleMs;
    const double log_c = std::log(static_cast<double>(std::max<std::size_t>(components, 1)));
    std::size_t row = 0;
    for (std::size_t r = 1; r < kRowComponents.size(); ++r) {
        if (std::abs(std::log(kRowComponents[r]) - log_c) <
            std::abs(std::log(kRowComponents[row]) - log_c)) {
            row = r;
        }
    }
    std::array<double, 4> cells{};
    for (std::size_t col = 0; col < 4; ++col) {
        std::size_t r = row;
        while (std::isnan(table[r][col]) && r + 1 < table.size()) ++r;
        cells[col] = table[r][col];
    }

    const double x = std::log(static_cast<double>(issues));
    std::size_t seg = 0;
    while (seg + 2 < kColumnIssues.size() && x > std::log(kColumnIssues[seg + 1])) ++seg;
    const double x0 = std::log(kColumnIssues[seg]);
    const double x1 = std::log(kColumnIssues[seg + 1]);
    const double y0 = std::log(cells[seg]);
    const double y1 = std::log(cells[seg + 1]);
    const double ms = std::exp(y0 + (y1 - y0) * (x - x0) / (x1 - x0));
    return ms / 1000.0;
}

}  // namespace selfheal
