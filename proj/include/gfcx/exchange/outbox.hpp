#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "gfcx/core/contact_card.hpp"
#include "gfcx/netsim/endpoint.hpp"

namespace gfcx::exchange {

/// What a protocol engine needs from whoever hosts it.
struct Outbox {
    /// Returns false if the frame was dropped in transit. May throw
    /// Error{NotInRange|UnknownEndpoint}.
    std::function<bool(netsim::EndpointId to, TransportClass transport, std::string bytes)> send;
    /// Deliver on_timer(tag) to the engine at the given time.
    std::function<void(std::int64_t at_ms, std::uint64_t tag)> schedule;
};

} // namespace gfcx::exchange
