#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "gfcx/core/profile.hpp"
#include "gfcx/exchange/message.hpp"

namespace gfcx::exchange {

/// What the owner's policy says about one request.
struct PolicyAnswer {
    enum class Kind : std::uint8_t { Send, Defer, Deny };
    Kind kind = Kind::Deny;
    Profile profile;                       // Send
    std::uint8_t reason = kDenyRefused;    // Deny

    static PolicyAnswer send(Profile p) { return {Kind::Send, std::move(p), 0}; }
    static PolicyAnswer defer() { return {Kind::Defer, {}, 0}; }
    static PolicyAnswer deny(std::uint8_t reason = kDenyRefused) { return {Kind::Deny, {}, reason}; }
};

/// Remembers the encoded reply to each (requester, request_id) for a window so
/// duplicates get byte-identical answers. Thread-safe.
class IdempotencyCache {
public:
    explicit IdempotencyCache(std::int64_t window_ms = 60'000) : window_ms_(window_ms) {}

    std::optional<std::string> lookup(netsim::EndpointId from, const Id128& id, std::int64_t now_ms);
    void store(netsim::EndpointId from, const Id128& id, std::string reply, std::int64_t now_ms);
    std::size_t size() const;

private:
    void purge(std::int64_t now_ms);

    struct Entry {
        std::string reply;
        std::int64_t stored_at_ms;
    };
    std::int64_t window_ms_;
    mutable std::mutex mutex_;
    std::map<std::pair<netsim::EndpointId, Id128>, Entry> entries_;
};

/// Responder side of an exchange: turns a REQUEST plus a policy decision into
/// the encoded reply frame.
class Responder {
public:
    explicit Responder(std::int64_t window_ms = 60'000) : cache_(window_ms) {}

    /// Replies with the cached bytes for a duplicate request inside the window
    /// without calling `policy`. A target code other than `own_code` (or no own
    /// code at all) is denied with kDenyUnknownCode. A deferred answer replies ACK.
    std::string handle_request(netsim::EndpointId from, const Request& request, const std::optional<GcCode>& own_code,
                               std::int64_t now_ms, const std::function<PolicyAnswer()>& policy);

    /// Final reply for a request that was deferred.
    std::string resolve_deferred(netsim::EndpointId from, const Id128& request_id, const PolicyAnswer& answer,
                                 std::int64_t now_ms);

    /// Number of times a policy callback was invoked.
    std::size_t policy_calls() const noexcept { return policy_calls_; }

private:
    static std::string reply_for(const Id128& id, const PolicyAnswer& answer);

    IdempotencyCache cache_;
    std::size_t policy_calls_ = 0;
};

} // namespace gfcx::exchange
