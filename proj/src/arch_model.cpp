#include "selfheal/arch_model.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "selfheal/random.hpp"

namespace selfheal {

namespace {

constexpr std::array<std::string_view, kSlotsPerShop> kSlotNames = {
    "Authentication",    "UserManagement",      "Persistence",         "Inventory",
    "ItemManagement",    "Query",               "BidAndBuy",           "Reputation",
    "Recommendation",    "CategoryItemFilter",  "RegionItemFilter",    "BuyNowItemFilter",
    "PastSalesItemFilter", "FutureSalesItemFilter", "LastSecondSalesItemFilter",
    "SellerReputationItemFilter", "CommentItemFilter", "ItemFilterAggregator",
};

// Degrees per slot lie in [2, 6].
constexpr std::array<std::pair<std::uint8_t, std::uint8_t>, 31> kTopology = {{
    {1, 0},  {1, 2},   {3, 2},   {4, 3},   {4, 0},   {5, 4},   {6, 0},   {6, 3},
    {6, 1},  {7, 2},   {7, 1},   {8, 5},   {8, 7},   {5, 9},   {9, 10},  {10, 11},
    {11, 12}, {12, 13}, {13, 14}, {14, 15}, {15, 7},  {15, 16}, {16, 17}, {17, 5},
    {9, 3},  {12, 4},  {16, 2},  {14, 0},  {10, 0},  {11, 0},  {13, 2},
}};

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

}  // namespace

std::string_view to_string(FailureKind kind) {
    switch (kind) {
        case FailureKind::CF1: return "CF1";
        case FailureKind::CF2: return "CF2";
        case FailureKind::CF3: return "CF3";
        case FailureKind::CF4: return "CF4";
    }
    return "?";
}

FailureKind failure_kind_from_string(std::string_view text) {
    if (text == "CF1") return FailureKind::CF1;
    if (text == "CF2") return FailureKind::CF2;
    if (text == "CF3") return FailureKind::CF3;
    if (text == "CF4") return FailureKind::CF4;
    throw Error("unknown failure kind: " + std::string(text));
}

std::string_view to_string(LifecycleState state) {
    switch (state) {
        case LifecycleState::Undeployed: return "UNDEPLOYED";
        case LifecycleState::Deployed: return "DEPLOYED";
        case LifecycleState::Started: return "STARTED";
        case LifecycleState::Crashed: return "CRASHED";
        case LifecycleState::Removed: return "REMOVED";
    }
    return "?";
}

std::string_view to_string(ConnectorState state) {
    return state == ConnectorState::Ok ? "OK" : "CRASHED";
}

std::string_view to_string(ChangeKind kind) {
    switch (kind) {
        case ChangeKind::ComponentCrashed: return "COMPONENT_CRASHED";
        case ChangeKind::ComponentRemoved: return "COMPONENT_REMOVED";
        case ChangeKind::ExceptionOccurred: return "EXCEPTION_OCCURRED";
        case ChangeKind::ConnectorCrashed: return "CONNECTOR_CRASHED";
        case ChangeKind::ComponentRestarted: return "COMPONENT_RESTARTED";
        case ChangeKind::ComponentRedeployed: return "COMPONENT_REDEPLOYED";
        case ChangeKind::ComponentReplaced: return "COMPONENT_REPLACED";
        case ChangeKind::ConnectorRecreated: return "CONNECTOR_RECREATED";
    }
    return "?";
}

std::string_view to_string(RepairKind kind) {
    switch (kind) {
        case RepairKind::Restart: return "RESTART";
        case RepairKind::LwRedeploy: return "LW_REDEPLOY";
        case RepairKind::HwRedeploy: return "HW_REDEPLOY";
        case RepairKind::Replace: return "REPLACE";
        case RepairKind::RecreateConnector: return "RECREATE_CONNECTOR";
    }
    return "?";
}

std::span<const std::string_view> slot_names() { return kSlotNames; }

std::span<const std::pair<std::uint8_t, std::uint8_t>> shop_topology() { return kTopology; }

bool ArchitectureModel::contains(ElementRef ref) const {
    if (ref.kind == ElementKind::Component) return ref.id < components_.size();
    return ref.id < connectors_.size();
}

std::array<ComponentTypeId, kAlternativesPerSlot> ArchitectureModel::alternatives(
    std::uint8_t slot) const {
    std::array<ComponentTypeId, kAlternativesPerSlot> ids{};
    for (std::size_t a = 0; a < kAlternativesPerSlot; ++a) {
        ids[a] = static_cast<ComponentTypeId>(slot * kAlternativesPerSlot + a);
    }
    return ids;
}

bool ArchitectureModel::is_healthy(ComponentId id) const {
    if (id >= components_.size()) return false;
    const Component& c = components_[id];
    if (c.retired || c.state != LifecycleState::Started || !c.failures.empty()) return false;
    return std::none_of(c.connectors.begin(), c.connectors.end(), [&](ConnectorId cid) {
        const Connector& k = connectors_[cid];
        return k.source == id && k.state == ConnectorState::Crashed;
    });
}

bool ArchitectureModel::is_eligible(FailureKind kind, ElementRef target) const {
    if (!contains(target)) return false;
    if (kind == FailureKind::CF4) {
        if (target.kind != ElementKind::Connector) return false;
        const Connector& k = connectors_[target.id];
        return k.state == ConnectorState::Ok && is_healthy(k.source);
    }
    return target.kind == ElementKind::Component && is_healthy(target.id);
}

std::optional<ElementRef> ArchitectureModel::select_target(FailureKind kind,
                                                           std::uint64_t selector) const {
    const bool connector = kind == FailureKind::CF4;
    const std::size_t population = connector ? connectors_.size() : shops_.size() * kSlotsPerShop;
    if (population == 0) return std::nullopt;

    auto resolve = [&](std::size_t index) {
        if (connector) return ElementRef::connector(static_cast<ConnectorId>(index));
        const Shop& s = shops_[index / kSlotsPerShop];
        return ElementRef::component(s.slots[index % kSlotsPerShop]);
    };

    std::uint64_t roll = selector;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const ElementRef candidate = resolve(roll % population);
        if (is_eligible(kind, candidate)) return candidate;
        roll = mix64(roll);
    }
    const std::size_t start = roll % population;
    for (std::size_t i = 0; i < population; ++i) {
        const ElementRef candidate = resolve((start + i) % population);
        if (is_eligible(kind, candidate)) return candidate;
    }
    return std::nullopt;
}

Component& ArchitectureModel::live_component(ComponentId id) {
    if (id >= components_.size() || components_[id].retired) {
        throw StaleMatch("component " + std::to_string(id) + " is not part of the architecture");
    }
    return components_[id];
}

void ArchitectureModel::add_failure(ComponentId id, Seconds time) {
    components_.at(id).failures.push_back(Failure{next_failure_id_++, id, time});
}

std::vector<ChangeEvent> ArchitectureModel::inject_failure(FailureKind kind, ElementRef target,
                                                           Seconds time) {
    if (!is_eligible(kind, target)) {
        throw TargetNotEligible(std::string(to_string(kind)) + " target is not eligible");
    }
    std::vector<ChangeEvent> events;
    switch (kind) {
        case FailureKind::CF1:
            components_[target.id].state = LifecycleState::Crashed;
            events.push_back({ChangeKind::ComponentCrashed, target, time});
            break;
        case FailureKind::CF2:
            for (std::size_t i = 0; i < kExceptionThreshold; ++i) {
                add_failure(target.id, time);
                events.push_back({ChangeKind::ExceptionOccurred, target, time});
            }
            break;
        case FailureKind::CF3:
            components_[target.id].state = LifecycleState::Removed;
            events.push_back({ChangeKind::ComponentRemoved, target, time});
            break;
        case FailureKind::CF4:
            connectors_[target.id].state = ConnectorState::Crashed;
            events.push_back({ChangeKind::ConnectorCrashed, target, time});
            break;
    }
    return events;
}

ComponentId ArchitectureModel::replace_component(ComponentId old_id, ComponentTypeId new_type) {
    const ComponentType& type = types_.at(new_type);
    Component& old_component = live_component(old_id);
    if (type.slot != old_component.slot) {
        throw InvalidRuleMatch("replacement type does not fit the component's slot");
    }
    Component fresh;
    fresh.id = static_cast<ComponentId>(components_.size());
    fresh.type = new_type;
    fresh.shop = old_component.shop;
    fresh.slot = old_component.slot;
    fresh.state = LifecycleState::Started;
    fresh.criticality = old_component.criticality;
    fresh.connectors = std::move(old_component.connectors);
    old_component.connectors.clear();
    old_component.failures.clear();
    old_component.state = LifecycleState::Undeployed;
    old_component.retired = true;

    for (ConnectorId cid : fresh.connectors) {
        Connector& k = connectors_[cid];
        if (k.source == old_id) k.source = fresh.id;
        if (k.target == old_id) k.target = fresh.id;
    }
    shops_[fresh.shop].slots[fresh.slot] = fresh.id;
    const ComponentId id = fresh.id;
    components_.push_back(std::move(fresh));
    return id;
}

std::vector<ChangeEvent> ArchitectureModel::apply_repair(const RepairAction& action, Seconds time) {
    std::vector<ChangeEvent> events;
    if (action.kind == RepairKind::RecreateConnector) {
        if (action.target.kind != ElementKind::Connector || !contains(action.target) ||
            connectors_[action.target.id].state != ConnectorState::Crashed) {
            throw StaleMatch("connector is not crashed");
        }
        connectors_[action.target.id].state = ConnectorState::Ok;
        events.push_back({ChangeKind::ConnectorRecreated, action.target, time});
        return events;
    }

    if (action.target.kind != ElementKind::Component) {
        throw InvalidRuleMatch("component repair aimed at a connector");
    }
    Component& c = live_component(action.target.id);
    const bool faulty = c.state == LifecycleState::Crashed || c.state == LifecycleState::Removed ||
                        (c.state == LifecycleState::Started && !c.failures.empty());
    if (!faulty) throw StaleMatch("component " + std::to_string(c.id) + " has no issue to repair");

    switch (action.kind) {
        case RepairKind::Restart:
            c.state = LifecycleState::Deployed;
            c.state = LifecycleState::Started;
            c.failures.clear();
            events.push_back({ChangeKind::ComponentRestarted, action.target, time});
            break;
        case RepairKind::LwRedeploy:
        case RepairKind::HwRedeploy:
            c.state = LifecycleState::Undeployed;
            c.state = LifecycleState::Deployed;
            c.state = LifecycleState::Started;
            c.failures.clear();
            events.push_back({ChangeKind::ComponentRedeployed, action.target, time});
            break;
        case RepairKind::Replace: {
            const ComponentId fresh = replace_component(action.target.id, action.replacement_type);
            events.push_back({ChangeKind::ComponentReplaced, action.target, time, fresh,
                              action.replacement_type});
            break;
        }
        case RepairKind::RecreateConnector:
            break;
    }
    return events;
}

void ArchitectureModel::replay(std::span<const ChangeEvent> events) {
    for (const ChangeEvent& e : events) {
        switch (e.kind) {
            case ChangeKind::ComponentCrashed:
                components_.at(e.subject.id).state = LifecycleState::Crashed;
                break;
            case ChangeKind::ComponentRemoved:
                components_.at(e.subject.id).state = LifecycleState::Removed;
                break;
            case ChangeKind::ExceptionOccurred:
                add_failure(e.subject.id, e.time);
                break;
            case ChangeKind::ConnectorCrashed:
                connectors_.at(e.subject.id).state = ConnectorState::Crashed;
                break;
            case ChangeKind::ComponentRestarted:
            case ChangeKind::ComponentRedeployed: {
                Component& c = components_.at(e.subject.id);
                c.state = LifecycleState::Started;
                c.failures.clear();
                break;
            }
            case ChangeKind::ComponentReplaced:
                if (replace_component(e.subject.id, e.replacement_type) != e.replacement) {
                    throw Error("replay diverged: replacement id mismatch");
                }
                break;
            case ChangeKind::ConnectorRecreated:
                connectors_.at(e.subject.id).state = ConnectorState::Ok;
                break;
        }
    }
}

void ArchitectureModel::set_criticality(ComponentId id, double criticality) {
    if (!(criticality > 0.0)) throw Error("criticality must be positive");
    components_.at(id).criticality = criticality;
}

void ArchitectureModel::set_reliability(ComponentTypeId id, double reliability) {
    if (!(reliability > 0.0 && reliability <= 1.0)) throw Error("reliability must be in (0,1]");
    types_.at(id).reliability = reliability;
}

void ArchitectureModel::set_component_type(ComponentId id, ComponentTypeId type) {
    Component& c = components_.at(id);
    if (types_.at(type).slot != c.slot) throw Error("type does not fit the component's slot");
    c.type = type;
}

ArchitectureModel build_architecture(std::size_t shops, std::uint64_t seed) {
    if (shops == 0) throw Error("an architecture needs at least one shop");
    Rng rng(seed);
    ArchitectureModel model;

    model.types_.reserve(kSlotsPerShop * kAlternativesPerSlot);
    for (std::size_t slot = 0; slot < kSlotsPerShop; ++slot) {
        std::array<std::uint64_t, kAlternativesPerSlot> ticks{};
        for (std::size_t a = 0; a < kAlternativesPerSlot; ++a) {
            std::uint64_t tick = 0;
            do {
                tick = rng.uniform_int(512, 1024);
            } while (std::find(ticks.begin(), ticks.begin() + a, tick) != ticks.begin() + a);
            ticks[a] = tick;
            ComponentType type;
            type.id = static_cast<ComponentTypeId>(model.types_.size());
            type.slot = static_cast<std::uint8_t>(slot);
            type.alternative = static_cast<std::uint8_t>(a);
            type.name = std::string(kSlotNames[slot]) + "#" + std::to_string(a);
            type.reliability = static_cast<double>(tick) / 1024.0;
            model.types_.push_back(std::move(type));
        }
    }

    model.shops_.reserve(shops);
    model.components_.reserve(shops * kSlotsPerShop);
    model.connectors_.reserve(shops * kTopology.size());
    for (std::size_t s = 0; s < shops; ++s) {
        Shop shop;
        shop.id = static_cast<ShopId>(s);
        for (std::size_t slot = 0; slot < kSlotsPerShop; ++slot) {
            Component c;
            c.id = static_cast<ComponentId>(model.components_.size());
            c.shop = shop.id;
            c.slot = static_cast<std::uint8_t>(slot);
            c.type = static_cast<ComponentTypeId>(slot * kAlternativesPerSlot +
                                                  rng.uniform_int(0, kAlternativesPerSlot - 1));
            c.criticality = static_cast<double>(rng.uniform_int(1, 10));
            c.state = LifecycleState::Started;
            shop.slots[slot] = c.id;
            model.components_.push_back(std::move(c));
        }
        for (const auto& [from, to] : kTopology) {
            Connector k;
            k.id = static_cast<ConnectorId>(model.connectors_.size());
            k.source = shop.slots[from];
            k.target = shop.slots[to];
            k.interface_slot = to;
            model.components_[k.source].connectors.push_back(k.id);
            model.components_[k.target].connectors.push_back(k.id);
            model.connectors_.push_back(k);
        }
        model.shops_.push_back(shop);
    }
    return model;
}

std::string to_snapshot(const ArchitectureModel& model) {
    std::ostringstream out;
    for (const ComponentType& t : model.types()) {
        out << "type " << t.id << ' ' << t.name << ' ' << int(t.slot) << ' ' << int(t.alternative)
            << ' ' << format_double(t.reliability) << '\n';
    }
    for (const Shop& s : model.shops()) {
        out << "shop " << s.id;
        for (ComponentId id : s.slots) out << ' ' << id;
        out << '\n';
    }
    for (const Component& c : model.components()) {
        out << "component " << c.id << ' ' << c.shop << ' ' << int(c.slot) << ' ' << c.type << ' '
            << to_string(c.state) << ' ' << format_double(c.criticality) << ' '
            << c.failures.size() << ' ' << (c.retired ? "retired" : "live") << '\n';
    }
    for (const Connector& k : model.connectors()) {
        out << "connector " << k.id << ' ' << k.source << ' ' << k.target << ' '
            << int(k.interface_slot) << ' ' << to_string(k.state) << '\n';
    }
    return out.str();
}

}  // namespace selfheal
