#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "gfcx/exchange/message.hpp"
#include "gfcx/exchange/outbox.hpp"
#include "gfcx/exchange/session.hpp"

namespace gfcx::exchange {

/// Drives the requester side of code-triggered exchanges: sends REQUEST,
/// retries on timer, and reports each session once it reaches a terminal state.
class Requester {
public:
    struct Outcome {
        Id128 request_id;
        SessionState state = SessionState::Sent;
        netsim::EndpointId peer;
        TransportClass transport = TransportClass::WideArea;
        GcCode target;
        std::string gfc_bytes;
        std::uint8_t deny_reason = 0;
        std::int64_t started_at_ms = 0;
        std::int64_t finished_at_ms = 0;
        int sends = 0;
    };

    /// Timer tags handed to Outbox::schedule are tag_prefix | counter.
    Requester(Outbox outbox, RetryPolicy policy, std::uint64_t seed, std::uint64_t tag_prefix = 0);

    const ExchangeSession& initiate_request(netsim::EndpointId peer, const GcCode& target_code,
                                            const std::optional<GcCode>& my_code, TransportClass transport,
                                            std::int64_t now_ms);

    /// Handles RESPONSE/DENY/ACK; other messages are ignored.
    std::optional<Outcome> on_message(netsim::EndpointId from, const Message& msg, std::int64_t now_ms);
    std::optional<Outcome> on_timer(std::uint64_t tag, std::int64_t now_ms);

    const ExchangeSession* find(const Id128& request_id) const;

private:
    struct Entry {
        ExchangeSession session;
        netsim::EndpointId peer;
        TransportClass transport;
        GcCode target;
        std::string request_bytes;
        std::uint64_t tag;
    };

    void arm(Entry& e);
    Outcome outcome_of(const Entry& e, std::string gfc_bytes) const;

    Outbox outbox_;
    RetryPolicy policy_;
    std::mt19937_64 rng_;
    std::uint64_t tag_prefix_;
    std::uint64_t next_tag_ = 0;
    std::unordered_map<Id128, Entry> sessions_;
    std::unordered_map<std::uint64_t, Id128> by_tag_;
};

} // namespace gfcx::exchange
