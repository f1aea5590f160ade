#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "selfheal/arch_model.hpp"

namespace selfheal {

enum class PatternId : std::uint8_t {
    StartedComponent,   // P+1: a STARTED component in a shop
    CrashedComponent,   // CF1
    FailingComponent,   // CF2 (P-2): STARTED with five or more failures
    RemovedComponent,   // CF3
    CrashedConnector,   // CF4
};

enum class Polarity : std::uint8_t { Positive, Negative };

struct Pattern {
    PatternId id;
    Polarity polarity;
    ElementKind anchor_kind;
    std::string_view name;
    std::optional<FailureKind> failure_kind;
};

std::span<const Pattern> all_patterns();
const Pattern& pattern(PatternId id);
PatternId negative_pattern_for(FailureKind kind);

struct MatchKey {
    PatternId pattern = PatternId::StartedComponent;
    ElementRef anchor;

    friend bool operator==(const MatchKey&, const MatchKey&) = default;
    friend auto operator<=>(const MatchKey&, const MatchKey&) = default;
};

struct MatchKeyHash {
    std::size_t operator()(const MatchKey& key) const noexcept {
        return std::hash<ElementRef>{}(key.anchor) * 8 + static_cast<std::size_t>(key.pattern);
    }
};

struct Match {
    PatternId pattern = PatternId::StartedComponent;
    ElementRef anchor;
    /// The component the match is about (the connector's source for CF4).
    ComponentId component = 0;
    /// U_i(G, m) evaluated on the model the match was found in.
    double utility = 0.0;

    MatchKey key() const { return {pattern, anchor}; }
};

/// Instrumentation for the locality and work-bound properties.
struct SearchStats {
    std::uint64_t match_attempts = 0;
    std::uint64_t elements_visited = 0;
};

/// criticality x reliability of the component's type x connectivity.
double u1(const ArchitectureModel& model, ComponentId component);
/// The P-2 sub-function, -u1.
inline double u2(const ArchitectureModel& model, ComponentId component) {
    return -u1(model, component);
}

/// Local match of `id` anchored at `anchor`; inspects a bounded neighbourhood only.
std::optional<Match> match_at(const ArchitectureModel& model, PatternId id, ElementRef anchor,
                              SearchStats* stats = nullptr);

/// Global search over the whole model.
std::vector<Match> find_all_matches(const ArchitectureModel& model);

/// Sum over all patterns and all matches of U_i(G, m), by full search.
double total_utility(const ArchitectureModel& model);

/// Anchors whose matches may have changed because of `events`.
std::vector<ElementRef> touched_anchors(const ArchitectureModel& model,
                                        std::span<const ChangeEvent> events);

/// Running utility total maintained from match creations and deletions.
///
/// Each contribution is cached when its match is created, so a deletion
/// subtracts the value from the model the match was found in.
class UtilityLedger {
public:
    UtilityLedger() = default;
    explicit UtilityLedger(const ArchitectureModel& model);

    double total() const { return total_; }
    std::size_t size() const { return contributions_.size(); }
    std::optional<double> contribution(const MatchKey& key) const;

    /// Applies explicit match-set differences and returns the utility change.
    double apply(std::span<const MatchKey> deleted, std::span<const Match> created);

    /// Recomputes the matches anchored at `anchors`, derives the new/deleted
    /// sets against the cache, applies them and returns the utility change.
    double refresh(const ArchitectureModel& model, std::span<const ElementRef> anchors);

private:
    std::unordered_map<MatchKey, double, MatchKeyHash> contributions_;
    double total_ = 0.0;
};

/// Utility change function: -sum over deleted of U(G,m) + sum over new of U(G',m).
double utility_delta(UtilityLedger& ledger, std::span<const Match> new_matches,
                     std::span<const Match> deleted_matches);

/// Local impact of a repair on the overall utility, computed without applying it.
///
/// |U_i| of the resolved negative match plus the change in positive matches the
/// repair enables or removes inside its scope.
double repair_impact(const ArchitectureModel& model, const RepairAction& action);

/// The negative match currently anchored at `anchor`, if any.
std::optional<Match> negative_match_at(const ArchitectureModel& model, ElementRef anchor,
                                       SearchStats* stats = nullptr);

}  // namespace selfheal
