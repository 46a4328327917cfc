#include "gfcx/exchange/requester.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx::exchange {

Requester::Requester(Outbox outbox, RetryPolicy policy, std::uint64_t seed, std::uint64_t tag_prefix)
    : outbox_(std::move(outbox))
    , policy_(policy)
    , rng_(seed)
    , tag_prefix_(tag_prefix)
{
}

void Requester::arm(Entry& e)
{
    outbox_.schedule(e.session.deadline_ms(), e.tag);
}

const ExchangeSession& Requester::initiate_request(netsim::EndpointId peer, const GcCode& target_code,
                                                   const std::optional<GcCode>& my_code, TransportClass transport,
                                                   std::int64_t now_ms)
{
    Id128 id = Id128::random(rng_);
    while (sessions_.count(id))
        id = Id128::random(rng_);
    const std::uint64_t tag = tag_prefix_ | next_tag_++;
    Entry e{ExchangeSession(id, now_ms, policy_), peer, transport, target_code,
            encode_message(Request{id, target_code, my_code}), tag};
    outbox_.send(peer, transport, e.request_bytes);
    auto [it, inserted] = sessions_.emplace(id, std::move(e));
    by_tag_.emplace(tag, id);
    arm(it->second);
    return it->second.session;
}

Requester::Outcome Requester::outcome_of(const Entry& e, std::string gfc_bytes) const
{
    return Outcome{e.session.request_id(), e.session.state(), e.peer, e.transport, e.target, std::move(gfc_bytes),
                   e.session.deny_reason(), e.session.started_at_ms(), e.session.finished_at_ms(), e.session.sends()};
}

std::optional<Requester::Outcome> Requester::on_message(netsim::EndpointId from, const Message& msg, std::int64_t now_ms)
{
    const Id128* id = nullptr;
    if (const auto* r = std::get_if<Response>(&msg))
        id = &r->request_id;
    else if (const auto* d = std::get_if<Deny>(&msg))
        id = &d->request_id;
    else if (const auto* a = std::get_if<Ack>(&msg))
        id = &a->request_id;
    if (!id)
        return std::nullopt;
    const auto it = sessions_.find(*id);
    if (it == sessions_.end() || it->second.peer != from)
        return std::nullopt;
    auto& e = it->second;

    if (const auto* r = std::get_if<Response>(&msg)) {
        if (e.session.on_response(now_ms))
            return outcome_of(e, r->gfc_bytes);
    } else if (const auto* d = std::get_if<Deny>(&msg)) {
        if (e.session.on_deny(d->reason, now_ms))
            return outcome_of(e, {});
    } else {
        const auto before = e.session.deadline_ms();
        e.session.on_ack(now_ms);
        if (e.session.deadline_ms() != before)
            arm(e);
    }
    return std::nullopt;
}

std::optional<Requester::Outcome> Requester::on_timer(std::uint64_t tag, std::int64_t now_ms)
{
    const auto t = by_tag_.find(tag);
    if (t == by_tag_.end())
        return std::nullopt;
    auto& e = sessions_.at(t->second);
    switch (e.session.on_timer(now_ms)) {
    case ExchangeSession::Action::None:
        return std::nullopt;
    case ExchangeSession::Action::Resend:
        try {
            outbox_.send(e.peer, e.transport, e.request_bytes);
        } catch (const Error&) {
            // peer left range: the retry counts as lost
        }
        arm(e);
        return std::nullopt;
    case ExchangeSession::Action::Finished:
        by_tag_.erase(t);
        return outcome_of(e, {});
    }
    return std::nullopt;
}

const ExchangeSession* Requester::find(const Id128& request_id) const
{
    const auto it = sessions_.find(request_id);
    return it == sessions_.end() ? nullptr : &it->second.session;
}

} // namespace gfcx::exchange
