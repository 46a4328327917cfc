#include "gfcx/exchange/responder.hpp"

#include "gfcx/core/gfc_format.hpp"

namespace gfcx::exchange {

std::optional<std::string> IdempotencyCache::lookup(netsim::EndpointId from, const Id128& id, std::int64_t now_ms)
{
    std::lock_guard lock(mutex_);
    purge(now_ms);
    const auto it = entries_.find({from, id});
    if (it == entries_.end())
        return std::nullopt;
    return it->second.reply;
}

void IdempotencyCache::store(netsim::EndpointId from, const Id128& id, std::string reply, std::int64_t now_ms)
{
    std::lock_guard lock(mutex_);
    purge(now_ms);
    entries_[{from, id}] = Entry{std::move(reply), now_ms};
}

std::size_t IdempotencyCache::size() const
{
    std::lock_guard lock(mutex_);
    return entries_.size();
}

void IdempotencyCache::purge(std::int64_t now_ms)
{
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (now_ms - it->second.stored_at_ms > window_ms_)
            it = entries_.erase(it);
        else
            ++it;
    }
}

std::string Responder::reply_for(const Id128& id, const PolicyAnswer& answer)
{
    switch (answer.kind) {
    case PolicyAnswer::Kind::Send:
        return encode_message(Response{id, serialize_gfc(answer.profile)});
    case PolicyAnswer::Kind::Defer:
        return encode_message(Ack{id});
    case PolicyAnswer::Kind::Deny:
        break;
    }
    return encode_message(Deny{id, answer.reason});
}

std::string Responder::handle_request(netsim::EndpointId from, const Request& request,
                                      const std::optional<GcCode>& own_code, std::int64_t now_ms,
                                      const std::function<PolicyAnswer()>& policy)
{
    if (auto cached = cache_.lookup(from, request.request_id, now_ms))
        return *cached;
    PolicyAnswer answer;
    if (!own_code || *own_code != request.target_code) {
        answer = PolicyAnswer::deny(kDenyUnknownCode);
    } else {
        ++policy_calls_;
        answer = policy();
    }
    auto reply = reply_for(request.request_id, answer);
    cache_.store(from, request.request_id, reply, now_ms);
    return reply;
}

std::string Responder::resolve_deferred(netsim::EndpointId from, const Id128& request_id, const PolicyAnswer& answer,
                                        std::int64_t now_ms)
{
    auto reply = reply_for(request_id, answer);
    cache_.store(from, request_id, reply, now_ms);
    return reply;
}

} // namespace gfcx::exchange
