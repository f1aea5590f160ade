#include "selfheal/analyzer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace selfheal {

namespace {

// Negative patterns that contain a node an event of the given kind can match.
std::span<const PatternId> patterns_for(ChangeKind kind) {
    static constexpr std::array<PatternId, 1> crashed = {PatternId::CrashedComponent};
    static constexpr std::array<PatternId, 1> removed = {PatternId::RemovedComponent};
    static constexpr std::array<PatternId, 1> failing = {PatternId::FailingComponent};
    static constexpr std::array<PatternId, 1> connector = {PatternId::CrashedConnector};
    static constexpr std::array<PatternId, 3> component = {
        PatternId::CrashedComponent, PatternId::FailingComponent, PatternId::RemovedComponent};
    switch (kind) {
        case ChangeKind::ComponentCrashed: return crashed;
        case ChangeKind::ComponentRemoved: return removed;
        case ChangeKind::ExceptionOccurred: return failing;
        case ChangeKind::ConnectorCrashed:
        case ChangeKind::ConnectorRecreated: return connector;
        case ChangeKind::ComponentRestarted:
        case ChangeKind::ComponentRedeployed:
        case ChangeKind::ComponentReplaced: return component;
    }
    return {};
}

}  // namespace

bool Issue::check(const ArchitectureModel& model) const {
    return match_at(model, match.pattern, match.anchor).has_value();
}

Issue& Annotations::add_issue(const Match& match) {
    Issue issue;
    issue.id = next_issue_id_++;
    issue.match = match;
    issue.failure = *pattern(match.pattern).failure_kind;
    issue.utility_drop = match.utility;
    return issues_.insert_or_assign(match.key(), std::move(issue)).first->second;
}

Issue* Annotations::find_issue(const MatchKey& key) {
    auto it = issues_.find(key);
    return it == issues_.end() ? nullptr : &it->second;
}

void Annotations::reset_best_rules() {
    best_.clear();
    best_sorted_ = true;
}

void Annotations::add_best_rule(const RuleMatch& rule) {
    // Min-heap on priority: the front is the weakest of the kept entries.
    if (best_sorted_ && !best_.empty()) std::make_heap(best_.begin(), best_.end(), higher_priority);
    best_sorted_ = false;
    if (best_.size() < capacity_) {
        best_.push_back(rule);
        std::push_heap(best_.begin(), best_.end(), higher_priority);
        return;
    }
    if (!higher_priority(rule, best_.front())) return;
    std::pop_heap(best_.begin(), best_.end(), higher_priority);
    best_.back() = rule;
    std::push_heap(best_.begin(), best_.end(), higher_priority);
}

const std::vector<RuleMatch>& Annotations::best_rules() const {
    if (!best_sorted_) {
        std::sort(best_.begin(), best_.end(), higher_priority);
        best_sorted_ = true;
    }
    return best_;
}

AnalyzeReport analyze(Annotations& annotations, std::span<const ChangeEvent> changes,
                      const ArchitectureModel& model) {
    AnalyzeReport report;
    SearchStats stats;

    const std::size_t before = annotations.issues().size();
    std::erase_if(annotations.issues(), [&](const auto& entry) {
        ++stats.match_attempts;
        return !entry.second.check(model);
    });
    report.stale_removed = before - annotations.issues().size();

    auto try_anchor = [&](PatternId id, ElementRef anchor) {
        auto m = match_at(model, id, anchor, &stats);
        if (m && !annotations.exists_issue(m->key())) {
            annotations.add_issue(*m);
            ++report.added;
        }
    };
    for (const ChangeEvent& change : changes) {
        for (PatternId id : patterns_for(change.kind)) {
            try_anchor(id, change.subject);
            if (change.kind == ChangeKind::ComponentReplaced) {
                try_anchor(id, ElementRef::component(change.replacement));
            }
        }
    }
    report.match_attempts = stats.match_attempts;
    return report;
}

IssueSet issue_oracle(const ArchitectureModel& model) {
    IssueSet issues;
    for (const Match& m : find_all_matches(model)) {
        if (pattern(m.pattern).polarity == Polarity::Negative) issues.emplace(m.key(), m.utility);
    }
    return issues;
}

IssueSet issue_set(const Annotations& annotations) {
    IssueSet issues;
    for (const auto& [key, issue] : annotations.issues()) issues.emplace(key, issue.utility_drop);
    return issues;
}

}  // namespace selfheal
