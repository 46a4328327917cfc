#pragma once

#include <cstdint>
#include <string_view>

#include "gfcx/core/id.hpp"

namespace gfcx::exchange {

enum class SessionState : std::uint8_t { Sent, Completed, Denied, TimedOut };

std::string_view session_state_name(SessionState s) noexcept;

constexpr bool is_terminal(SessionState s) noexcept
{
    return s != SessionState::Sent;
}

struct RetryPolicy {
    std::int64_t interval_ms = 2000;
    int max_retries = 2;
    /// After an ACK the requester waits this long for the owner's decision.
    std::int64_t approval_wait_ms = 125'000;
};

/// Requester-side state of one REQUEST. Terminal states are absorbing: every
/// event after one is ignored.
class ExchangeSession {
public:
    enum class Action : std::uint8_t { None, Resend, Finished };

    ExchangeSession(Id128 request_id, std::int64_t started_at_ms, RetryPolicy policy = {});

    const Id128& request_id() const noexcept { return request_id_; }
    SessionState state() const noexcept { return state_; }
    std::int64_t started_at_ms() const noexcept { return started_at_ms_; }
    std::int64_t finished_at_ms() const noexcept { return finished_at_ms_; }
    int retries_used() const noexcept { return retries_used_; }
    int sends() const noexcept { return 1 + retries_used_; }
    bool acknowledged() const noexcept { return acked_; }
    std::uint8_t deny_reason() const noexcept { return deny_reason_; }
    /// Time of the next retry or timeout check.
    std::int64_t deadline_ms() const noexcept { return deadline_ms_; }

    /// Fires at or after deadline_ms(); earlier calls are stale and return None.
    Action on_timer(std::int64_t now_ms);
    /// Returns true if this moved the session to Completed.
    bool on_response(std::int64_t now_ms);
    bool on_deny(std::uint8_t reason, std::int64_t now_ms);
    void on_ack(std::int64_t now_ms);

private:
    void finish(SessionState s, std::int64_t now_ms);

    Id128 request_id_;
    RetryPolicy policy_;
    SessionState state_ = SessionState::Sent;
    std::int64_t started_at_ms_;
    std::int64_t finished_at_ms_ = -1;
    std::int64_t deadline_ms_;
    int retries_used_ = 0;
    bool acked_ = false;
    std::uint8_t deny_reason_ = 0;
};

} // namespace gfcx::exchange
