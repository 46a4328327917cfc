#include "gfcx/exchange/session.hpp"

namespace gfcx::exchange {

std::string_view session_state_name(SessionState s) noexcept
{
    switch (s) {
    case SessionState::Sent:
        return "SENT";
    case SessionState::Completed:
        return "COMPLETED";
    case SessionState::Denied:
        return "DENIED";
    case SessionState::TimedOut:
        return "TIMEDOUT";
    }
    return "SENT";
}

ExchangeSession::ExchangeSession(Id128 request_id, std::int64_t started_at_ms, RetryPolicy policy)
    : request_id_(request_id)
    , policy_(policy)
    , started_at_ms_(started_at_ms)
    , deadline_ms_(started_at_ms + policy.interval_ms)
{
}

void ExchangeSession::finish(SessionState s, std::int64_t now_ms)
{
    state_ = s;
    finished_at_ms_ = now_ms;
}

ExchangeSession::Action ExchangeSession::on_timer(std::int64_t now_ms)
{
    if (is_terminal(state_) || now_ms < deadline_ms_)
        return Action::None;
    if (!acked_ && retries_used_ < policy_.max_retries) {
        ++retries_used_;
        deadline_ms_ = now_ms + policy_.interval_ms;
        return Action::Resend;
    }
    finish(SessionState::TimedOut, now_ms);
    return Action::Finished;
}

bool ExchangeSession::on_response(std::int64_t now_ms)
{
    if (is_terminal(state_))
        return false;
    finish(SessionState::Completed, now_ms);
    return true;
}

bool ExchangeSession::on_deny(std::uint8_t reason, std::int64_t now_ms)
{
    if (is_terminal(state_))
        return false;
    deny_reason_ = reason;
    finish(SessionState::Denied, now_ms);
    return true;
}

void ExchangeSession::on_ack(std::int64_t now_ms)
{
    if (is_terminal(state_) || acked_)
        return;
    acked_ = true;
    deadline_ms_ = now_ms + policy_.approval_wait_ms;
}

} // namespace gfcx::exchange
