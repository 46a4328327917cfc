#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "gfcx/exchange/outbox.hpp"
#include "gfcx/exchange/session.hpp"
#include "gfcx/registry/wire.hpp"

namespace gfcx::registry {

/// Node-side registry stub. Each call gets a fresh txn and is resent on the
/// policy interval until a reply arrives or the retries run out.
class RegistryClient {
public:
    struct Result {
        std::uint32_t txn = 0;
        std::optional<RegMessage> reply; // nullopt: timed out
        int sends = 0;
    };

    RegistryClient(exchange::Outbox outbox, netsim::EndpointId registry, exchange::RetryPolicy policy = {},
                   std::uint64_t tag_prefix = 0);

    netsim::EndpointId registry() const noexcept { return registry_; }

    /// Overwrites the txn in `request`; returns it.
    std::uint32_t call(RegMessage request, std::int64_t now_ms);

    /// Replies not from the registry endpoint, or for unknown txns, are ignored.
    std::optional<Result> on_frame(netsim::EndpointId from, const exchange::Frame& frame);
    std::optional<Result> on_timer(std::uint64_t tag, std::int64_t now_ms);

    std::size_t in_flight() const noexcept { return calls_.size(); }

private:
    struct Call {
        std::string bytes;
        int sends = 0;
        std::uint64_t tag = 0;
    };

    void transmit(Call& c, std::int64_t now_ms);

    exchange::Outbox outbox_;
    netsim::EndpointId registry_;
    exchange::RetryPolicy policy_;
    std::uint64_t tag_prefix_;
    std::uint64_t next_tag_ = 0;
    std::uint32_t next_txn_ = 1;
    std::map<std::uint32_t, Call> calls_;
    std::map<std::uint64_t, std::uint32_t> by_tag_;
};

} // namespace gfcx::registry
