#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "gfcx/core/contact_card.hpp"

namespace gfcx::netsim {

/// Opaque 8-byte address, unique within one simulation.
struct EndpointId {
    std::uint64_t value = 0;

    /// 16 lowercase hex characters.
    std::string hex() const;
    static std::optional<EndpointId> from_hex(std::string_view text);

    friend bool operator==(const EndpointId&, const EndpointId&) = default;
    friend auto operator<=>(const EndpointId&, const EndpointId&) = default;
};

enum Reachability : std::uint8_t {
    kReachProximity = 0x01,
    kReachWideArea = 0x02,
    kReachAll = kReachProximity | kReachWideArea,
};

constexpr std::uint8_t reach_bit(TransportClass t) noexcept
{
    return t == TransportClass::Proximity ? kReachProximity : kReachWideArea;
}

struct Endpoint {
    EndpointId id;
    std::uint8_t reachability = kReachAll;

    bool reaches(TransportClass t) const noexcept { return (reachability & reach_bit(t)) != 0; }

    friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

} // namespace gfcx::netsim

template <>
struct std::hash<gfcx::netsim::EndpointId> {
    std::size_t operator()(const gfcx::netsim::EndpointId& id) const noexcept
    {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
