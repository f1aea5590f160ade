#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selfheal/types.hpp"

namespace selfheal {

inline constexpr std::size_t kSlotsPerShop = 18;
inline constexpr std::size_t kAlternativesPerSlot = 3;
/// CF2 injects exactly this many exceptions; also the P-2 match threshold.
inline constexpr std::size_t kExceptionThreshold = 5;

enum class LifecycleState : std::uint8_t { Undeployed, Deployed, Started, Crashed, Removed };
enum class ConnectorState : std::uint8_t { Ok, Crashed };

std::string_view to_string(LifecycleState state);
std::string_view to_string(ConnectorState state);

struct ComponentType {
    ComponentTypeId id = 0;
    std::string name;
    std::uint8_t slot = 0;
    std::uint8_t alternative = 0;
    double reliability = 1.0;
};

struct Failure {
    FailureId id = 0;
    ComponentId component = 0;
    Seconds time = 0.0;
};

struct Component {
    ComponentId id = 0;
    ComponentTypeId type = 0;
    ShopId shop = 0;
    std::uint8_t slot = 0;
    LifecycleState state = LifecycleState::Started;
    double criticality = 1.0;
    std::vector<Failure> failures;
    /// Every connector with this component at either end.
    std::vector<ConnectorId> connectors;
    /// Replaced instances stay in storage so ids remain stable, but belong to no shop.
    bool retired = false;

    std::size_t connectivity() const { return connectors.size(); }
};

struct Connector {
    ConnectorId id = 0;
    ComponentId source = 0;  // owner of the required interface
    ComponentId target = 0;  // owner of the provided interface
    std::uint8_t interface_slot = 0;
    ConnectorState state = ConnectorState::Ok;
};

struct Shop {
    ShopId id = 0;
    std::array<ComponentId, kSlotsPerShop> slots{};
};

enum class ChangeKind : std::uint8_t {
    ComponentCrashed,
    ComponentRemoved,
    ExceptionOccurred,
    ConnectorCrashed,
    ComponentRestarted,
    ComponentRedeployed,
    ComponentReplaced,
    ConnectorRecreated,
};

std::string_view to_string(ChangeKind kind);

struct ChangeEvent {
    ChangeKind kind = ChangeKind::ComponentCrashed;
    ElementRef subject;
    Seconds time = 0.0;
    /// Only for ComponentReplaced: the new instance and its type.
    ComponentId replacement = 0;
    ComponentTypeId replacement_type = 0;
};

enum class RepairKind : std::uint8_t { Restart, LwRedeploy, HwRedeploy, Replace, RecreateConnector };

std::string_view to_string(RepairKind kind);

struct RepairAction {
    RepairKind kind = RepairKind::Restart;
    ElementRef target;
    /// Only for Replace.
    ComponentTypeId replacement_type = 0;
};

/// Slot names of the 18 components every shop instantiates.
std::span<const std::string_view> slot_names();

/// Fixed per-shop connector layout as (requiring slot, providing slot) pairs.
std::span<const std::pair<std::uint8_t, std::uint8_t>> shop_topology();

/// Architectural runtime model: shops, components, connectors, failures.
///
/// Plain value type. Copy it to hand a snapshot to another thread; never
/// mutate one instance from two threads.
class ArchitectureModel {
public:
    ArchitectureModel() = default;

    const std::vector<ComponentType>& types() const { return types_; }
    const std::vector<Shop>& shops() const { return shops_; }
    const std::vector<Component>& components() const { return components_; }
    const std::vector<Connector>& connectors() const { return connectors_; }

    const ComponentType& type(ComponentTypeId id) const { return types_.at(id); }
    const Component& component(ComponentId id) const { return components_.at(id); }
    const Connector& connector(ConnectorId id) const { return connectors_.at(id); }
    const Shop& shop(ShopId id) const { return shops_.at(id); }

    bool contains(ElementRef ref) const;

    /// Number of live (non-retired) components.
    std::size_t live_component_count() const { return shops_.size() * kSlotsPerShop; }

    /// The alternative component types that can fill a slot.
    std::array<ComponentTypeId, kAlternativesPerSlot> alternatives(std::uint8_t slot) const;

    /// STARTED, no failures, no crashed outgoing connector.
    bool is_healthy(ComponentId id) const;
    bool is_eligible(FailureKind kind, ElementRef target) const;

    /// Resolves a trace selector to an eligible element, re-rolling on ineligible hits.
    std::optional<ElementRef> select_target(FailureKind kind, std::uint64_t selector) const;

    // Mutations. Each returns the change events it caused.
    std::vector<ChangeEvent> inject_failure(FailureKind kind, ElementRef target, Seconds time);
    std::vector<ChangeEvent> apply_repair(const RepairAction& action, Seconds time);

    /// Re-applies a recorded event log to this model.
    void replay(std::span<const ChangeEvent> events);

    /// Direct attribute edits for pinned scenarios and tests.
    void set_criticality(ComponentId id, double criticality);
    void set_reliability(ComponentTypeId id, double reliability);
    void set_component_type(ComponentId id, ComponentTypeId type);

    friend ArchitectureModel build_architecture(std::size_t shops, std::uint64_t seed);

private:
    void add_failure(ComponentId id, Seconds time);
    ComponentId replace_component(ComponentId old_id, ComponentTypeId new_type);
    Component& live_component(ComponentId id);

    std::vector<ComponentType> types_;
    std::vector<Shop> shops_;
    std::vector<Component> components_;
    std::vector<Connector> connectors_;
    FailureId next_failure_id_ = 0;
};

/// Builds `shops` shops of 18 STARTED components each.
///
/// Criticality is uniform on {1..10}; reliability is uniform on [0.5, 1.0]
/// quantized to 1/1024; each slot has three alternative types with distinct
/// reliabilities and each component starts with a uniformly chosen one.
ArchitectureModel build_architecture(std::size_t shops, std::uint64_t seed);

/// One element per line: `type`, `shop`, `component`, `connector`.
std::string to_snapshot(const ArchitectureModel& model);

}  // namespace selfheal
