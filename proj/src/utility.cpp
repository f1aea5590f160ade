#include "selfheal/utility.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace selfheal {

namespace {

constexpr std::array<Pattern, 5> kPatterns = {{
    {PatternId::StartedComponent, Polarity::Positive, ElementKind::Component, "P+1", std::nullopt},
    {PatternId::CrashedComponent, Polarity::Negative, ElementKind::Component, "CF1",
     FailureKind::CF1},
    {PatternId::FailingComponent, Polarity::Negative, ElementKind::Component, "CF2",
     FailureKind::CF2},
    {PatternId::RemovedComponent, Polarity::Negative, ElementKind::Component, "CF3",
     FailureKind::CF3},
    {PatternId::CrashedConnector, Polarity::Negative, ElementKind::Connector, "CF4",
     FailureKind::CF4},
}};

constexpr std::array<PatternId, 3> kComponentNegatives = {
    PatternId::CrashedComponent, PatternId::FailingComponent, PatternId::RemovedComponent};

void visit(SearchStats* stats, std::uint64_t n = 1) {
    if (stats) stats->elements_visited += n;
}

}  // namespace

std::span<const Pattern> all_patterns() { return kPatterns; }

const Pattern& pattern(PatternId id) { return kPatterns[static_cast<std::size_t>(id)]; }

PatternId negative_pattern_for(FailureKind kind) {
    switch (kind) {
        case FailureKind::CF1: return PatternId::CrashedComponent;
        case FailureKind::CF2: return PatternId::FailingComponent;
        case FailureKind::CF3: return PatternId::RemovedComponent;
        case FailureKind::CF4: return PatternId::CrashedConnector;
    }
    return PatternId::CrashedComponent;
}

double u1(const ArchitectureModel& model, ComponentId component) {
    const Component& c = model.component(component);
    return c.criticality * model.type(c.type).reliability * static_cast<double>(c.connectivity());
}

std::optional<Match> match_at(const ArchitectureModel& model, PatternId id, ElementRef anchor,
                              SearchStats* stats) {
    if (stats) ++stats->match_attempts;
    const Pattern& p = pattern(id);
    if (anchor.kind != p.anchor_kind || !model.contains(anchor)) return std::nullopt;

    if (id == PatternId::CrashedConnector) {
        const Connector& k = model.connector(anchor.id);
        visit(stats);
        if (k.state != ConnectorState::Crashed) return std::nullopt;
        const Component& source = model.component(k.source);
        visit(stats, 2);  // source and its type
        const double share = source.criticality * model.type(source.type).reliability;
        return Match{id, anchor, k.source, -share};
    }

    const Component& c = model.component(anchor.id);
    visit(stats);
    if (c.retired) return std::nullopt;
    bool matched = false;
    switch (id) {
        case PatternId::StartedComponent: matched = c.state == LifecycleState::Started; break;
        case PatternId::CrashedComponent: matched = c.state == LifecycleState::Crashed; break;
        case PatternId::RemovedComponent: matched = c.state == LifecycleState::Removed; break;
        case PatternId::FailingComponent:
            matched = c.state == LifecycleState::Started && c.failures.size() >= kExceptionThreshold;
            break;
        case PatternId::CrashedConnector: break;
    }
    if (!matched) return std::nullopt;
    visit(stats);  // the component type
    const double value = u1(model, anchor.id);
    return Match{id, anchor, anchor.id, p.polarity == Polarity::Positive ? value : -value};
}

std::optional<Match> negative_match_at(const ArchitectureModel& model, ElementRef anchor,
                                       SearchStats* stats) {
    if (anchor.kind == ElementKind::Connector) {
        return match_at(model, PatternId::CrashedConnector, anchor, stats);
    }
    for (PatternId id : kComponentNegatives) {
        if (auto m = match_at(model, id, anchor, stats)) return m;
    }
    return std::nullopt;
}

std::vector<Match> find_all_matches(const ArchitectureModel& model) {
    std::vector<Match> matches;
    for (const Component& c : model.components()) {
        for (const Pattern& p : kPatterns) {
            if (p.anchor_kind != ElementKind::Component) continue;
            if (auto m = match_at(model, p.id, ElementRef::component(c.id))) matches.push_back(*m);
        }
    }
    for (const Connector& k : model.connectors()) {
        if (auto m = match_at(model, PatternId::CrashedConnector, ElementRef::connector(k.id))) {
            matches.push_back(*m);
        }
    }
    return matches;
}

double total_utility(const ArchitectureModel& model) {
    double total = 0.0;
    for (const Match& m : find_all_matches(model)) total += m.utility;
    return total;
}

std::vector<ElementRef> touched_anchors(const ArchitectureModel& model,
                                        std::span<const ChangeEvent> events) {
    std::vector<ElementRef> anchors;
    auto touch_component = [&](ComponentId id) {
        anchors.push_back(ElementRef::component(id));
        // CF4 values read the source component, so its connectors are in scope too.
        for (ConnectorId cid : model.component(id).connectors) {
            anchors.push_back(ElementRef::connector(cid));
        }
    };
    for (const ChangeEvent& e : events) {
        if (e.subject.kind == ElementKind::Connector) {
            anchors.push_back(e.subject);
            continue;
        }
        touch_component(e.subject.id);
        if (e.kind == ChangeKind::ComponentReplaced) touch_component(e.replacement);
    }
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
    return anchors;
}

UtilityLedger::UtilityLedger(const ArchitectureModel& model) {
    for (const Match& m : find_all_matches(model)) {
        contributions_.emplace(m.key(), m.utility);
        total_ += m.utility;
    }
}

std::optional<double> UtilityLedger::contribution(const MatchKey& key) const {
    auto it = contributions_.find(key);
    if (it == contributions_.end()) return std::nullopt;
    return it->second;
}

double UtilityLedger::apply(std::span<const MatchKey> deleted, std::span<const Match> created) {
    double delta = 0.0;
    for (const MatchKey& key : deleted) {
        auto it = contributions_.find(key);
        if (it == contributions_.end()) continue;
        delta -= it->second;
        contributions_.erase(it);
    }
    for (const Match& m : created) {
        auto [it, inserted] = contributions_.emplace(m.key(), m.utility);
        if (!inserted) {
            delta -= it->second;
            it->second = m.utility;
        }
        delta += m.utility;
    }
    total_ += delta;
    return delta;
}

double UtilityLedger::refresh(const ArchitectureModel& model, std::span<const ElementRef> anchors) {
    std::vector<MatchKey> deleted;
    std::vector<Match> created;
    for (const ElementRef& anchor : anchors) {
        for (const Pattern& p : kPatterns) {
            if (p.anchor_kind != anchor.kind) continue;
            const MatchKey key{p.id, anchor};
            const auto now = match_at(model, p.id, anchor);
            const auto cached = contribution(key);
            // A match whose context changed is treated as deleted and re-created.
            if (cached && (!now || now->utility != *cached)) deleted.push_back(key);
            if (now && (!cached || now->utility != *cached)) created.push_back(*now);
        }
    }
    return apply(deleted, created);
}

double utility_delta(UtilityLedger& ledger, std::span<const Match> new_matches,
                     std::span<const Match> deleted_matches) {
    std::vector<MatchKey> keys;
    keys.reserve(deleted_matches.size());
    for (const Match& m : deleted_matches) keys.push_back(m.key());
    return ledger.apply(keys, new_matches);
}

double repair_impact(const ArchitectureModel& model, const RepairAction& action) {
    const auto issue = negative_match_at(model, action.target);
    if (!issue) throw InvalidRuleMatch("no negative match at the repair target");

    const double resolved = std::abs(issue->utility);
    if (action.kind == RepairKind::RecreateConnector) {
        if (issue->pattern != PatternId::CrashedConnector) {
            throw InvalidRuleMatch("connector repair aimed at a component issue");
        }
        return resolved;
    }
    if (issue->pattern == PatternId::CrashedConnector) {
        throw InvalidRuleMatch("component repair aimed at a connector issue");
    }

    const Component& c = model.component(action.target.id);
    // P+1 is currently matched only for CF2 (the component is still STARTED).
    const double lost_positive = issue->pattern == PatternId::FailingComponent ? u1(model, c.id) : 0.0;
    double enabled_positive = u1(model, c.id);
    if (action.kind == RepairKind::Replace) {
        const ComponentType& replacement = model.type(action.replacement_type);
        if (replacement.slot != c.slot) throw InvalidRuleMatch("replacement type misfits slot");
        enabled_positive = c.criticality * replacement.reliability *
                           static_cast<double>(c.connectivity());
    }
    return resolved - lost_positive + enabled_positive;
}

}  // namespace selfheal
