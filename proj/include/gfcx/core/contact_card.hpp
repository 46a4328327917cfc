#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/profile.hpp"

namespace gfcx {

/// Proximity stands in for Bluetooth, WideArea for carrier/satellite links.
enum class TransportClass : std::uint8_t {
    Proximity = 1,
    WideArea = 2,
};

std::string_view transport_name(TransportClass t) noexcept;
/// Accepts "PROXIMITY" / "WIDEAREA". Throws Error{Validation}.
TransportClass transport_from_name(std::string_view name);

/// A received profile plus provenance. The snapshot never changes after receipt.
struct ContactCard {
    GcCode source_code;
    Profile profile_snapshot;
    /// UTC milliseconds; unique per source within one store.
    std::int64_t received_at_ms = 0;
    TransportClass transport = TransportClass::WideArea;
    std::optional<std::string> classification;
};

} // namespace gfcx
