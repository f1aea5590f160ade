#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "selfheal/arch_model.hpp"
#include "selfheal/rules.hpp"
#include "selfheal/utility.hpp"

namespace selfheal {

/// An annotated match of a negative pattern.
struct Issue {
    std::uint64_t id = 0;  // detection order
    Match match;
    FailureKind failure = FailureKind::CF1;
    double utility_drop = 0.0;
    std::optional<RuleMatch> handled_by;

    MatchKey key() const { return match.key(); }
    ComponentId affected_component() const { return match.component; }

    /// Constant-time re-evaluation of the match predicate.
    bool check(const ArchitectureModel& model) const;
};

/// Knowledge shared by the analysis and planning phases: the current issues
/// and the ordered best-k rule matches.
class Annotations {
public:
    explicit Annotations(std::size_t k = 100) : capacity_(k == 0 ? 1 : k) {}

    std::size_t capacity() const { return capacity_; }
    void set_capacity(std::size_t k) { capacity_ = k == 0 ? 1 : k; }

    bool exists_issue(const MatchKey& key) const { return issues_.contains(key); }
    Issue& add_issue(const Match& match);
    void delete_issue(const MatchKey& key) { issues_.erase(key); }
    Issue* find_issue(const MatchKey& key);

    std::unordered_map<MatchKey, Issue, MatchKeyHash>& issues() { return issues_; }
    const std::unordered_map<MatchKey, Issue, MatchKeyHash>& issues() const { return issues_; }

    void reset_best_rules();
    /// Keeps only the k best entries by priority.
    void add_best_rule(const RuleMatch& rule);
    /// Sorted by ratio, descending.
    const std::vector<RuleMatch>& best_rules() const;

private:
    std::unordered_map<MatchKey, Issue, MatchKeyHash> issues_;
    std::size_t capacity_;
    std::uint64_t next_issue_id_ = 0;
    mutable std::vector<RuleMatch> best_;
    mutable bool best_sorted_ = true;
};

struct AnalyzeReport {
    std::size_t stale_removed = 0;
    std::size_t added = 0;
    std::uint64_t match_attempts = 0;
};

/// Incremental issue maintenance from a change set.
///
/// Sweeps every stored issue and drops the ones whose match no longer holds,
/// then locally matches the negative patterns relevant to each changed element.
AnalyzeReport analyze(Annotations& annotations, std::span<const ChangeEvent> changes,
                      const ArchitectureModel& model);

/// Issue key -> utility drop, for comparing issue sets.
using IssueSet = std::map<MatchKey, double>;

/// Exhaustive search for negative-pattern matches over the whole model.
IssueSet issue_oracle(const ArchitectureModel& model);
IssueSet issue_set(const Annotations& annotations);

}  // namespace selfheal
