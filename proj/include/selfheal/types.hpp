#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace selfheal {

using ComponentId = std::uint32_t;
using ConnectorId = std::uint32_t;
using ComponentTypeId = std::uint32_t;
using ShopId = std::uint32_t;
using FailureId = std::uint64_t;

/// Virtual simulation time in seconds.
using Seconds = double;

enum class ElementKind : std::uint8_t { Component, Connector };

/// Reference to an element of the runtime model; the anchor of a pattern match.
struct ElementRef {
    ElementKind kind = ElementKind::Component;
    std::uint32_t id = 0;

    static ElementRef component(ComponentId id) { return {ElementKind::Component, id}; }
    static ElementRef connector(ConnectorId id) { return {ElementKind::Connector, id}; }

    friend bool operator==(const ElementRef&, const ElementRef&) = default;
    friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

/// The four failure classes injected into the architecture.
enum class FailureKind : std::uint8_t { CF1, CF2, CF3, CF4 };

std::string_view to_string(FailureKind kind);
FailureKind failure_kind_from_string(std::string_view text);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TargetNotEligible : public Error {
public:
    using Error::Error;
};

class StaleMatch : public Error {
public:
    using Error::Error;
};

class InvalidRuleMatch : public Error {
public:
    using Error::Error;
};

class OracleTooLarge : public Error {
public:
    using Error::Error;
};

class InsufficientTailSamples : public Error {
public:
    using Error::Error;
};

}  // namespace selfheal

template <>
struct std::hash<selfheal::ElementRef> {
    std::size_t operator()(const selfheal::ElementRef& ref) const noexcept {
        return (static_cast<std::size_t>(ref.id) << 1) ^ static_cast<std::size_t>(ref.kind);
    }
};
