#include "gfcx/registry/service.hpp"

#include "gfcx/exchange/bytes.hpp"

namespace gfcx::registry {

namespace {

constexpr std::int64_t kReplyCacheMs = 60'000;

RegChallenge to_wire(std::uint32_t txn, const ChallengeTicket& t)
{
    return RegChallenge{txn, t.challenge_id, t.code, t.expires_at, static_cast<std::uint8_t>(t.attempts_left)};
}

} // namespace

RegistryService::RegistryService(Registry& registry, Timestamp epoch_s)
    : registry_(registry)
    , epoch_s_(epoch_s)
{
}

RegMessage RegistryService::dispatch(const netsim::Endpoint& sender, const RegMessage& req, Timestamp now)
{
    const auto txn = txn_of(req);
    try {
        if (const auto* m = std::get_if<RegBegin>(&req)) {
            // The binding points at whoever asked; a client can choose its
            // advertised reachability but not somebody else's endpoint id.
            const netsim::Endpoint ep{sender.id, m->endpoint.reachability};
            return to_wire(txn, registry_.begin_registration(m->code, m->phone, ep, now));
        }
        if (const auto* m = std::get_if<RegComplete>(&req)) {
            const auto b = registry_.complete_registration(m->challenge_id, m->otp, now);
            return RegOk{txn, b.code, b.status, b.verified_at.value_or(now)};
        }
        if (const auto* m = std::get_if<ResolveReq>(&req)) {
            const auto r = registry_.resolve(m->code);
            return ResolveOk{txn, m->code, r.endpoint, r.phone_hint};
        }
        if (const auto* m = std::get_if<RegReauth>(&req)) {
            // Only the bound endpoint may ask for a revocation OTP.
            const auto b = registry_.binding(m->code);
            if (!b || b->status != BindingStatus::Active || b->endpoint.id != sender.id)
                throw Error(Errc::NotFound, "no active binding for this endpoint");
            auto t = registry_.begin_reauth(m->code, now);
            t.challenge_id = Id128{};
            return to_wire(txn, t);
        }
        if (const auto* m = std::get_if<RegRevoke>(&req)) {
            registry_.revoke(m->code, m->otp, now);
            return RegOk{txn, m->code, BindingStatus::Revoked, now};
        }
        return RegError{txn, Errc::UnknownMsgType, "not a registry request"};
    } catch (const Error& e) {
        return RegError{txn, e.code(), e.detail()};
    }
}

std::optional<std::string> RegistryService::handle(netsim::EndpointId from, netsim::Endpoint sender,
                                                   std::string_view bytes, std::int64_t now_ms)
{
    for (auto it = replies_.begin(); it != replies_.end();) {
        if (now_ms - it->second.at_ms > kReplyCacheMs)
            it = replies_.erase(it);
        else
            ++it;
    }

    exchange::Frame frame;
    try {
        frame = exchange::decode_frame(bytes);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!is_registry_msg_type(frame.msg_type))
        return std::nullopt;

    RegMessage req = RegError{};
    try {
        req = decode_reg(frame);
    } catch (const Error& e) {
        if (frame.payload.size() < 4)
            return std::nullopt;
        exchange::ByteReader r(frame.payload);
        return encode_reg(RegError{r.u32(), e.code(), e.detail()});
    }
    const auto key = std::make_pair(from, txn_of(req));
    if (const auto c = replies_.find(key); c != replies_.end())
        return c->second.reply;

    auto reply = encode_reg(dispatch(sender, req, to_seconds(now_ms)));
    replies_[key] = Cached{reply, now_ms};
    return reply;
}

RegistryNode::RegistryNode(netsim::Simulator& sim, Registry& registry, Timestamp epoch_s)
    : sim_(sim)
    , self_(sim.add_endpoint(netsim::kReachWideArea))
    , service_(registry, epoch_s)
{
    sim_.attach(self_.id, this);
}

RegistryNode::~RegistryNode()
{
    sim_.detach(self_.id);
}

void RegistryNode::on_frame(const netsim::Delivery& d)
{
    if (d.transport != TransportClass::WideArea)
        return;
    auto reply = service_.handle(d.from, sim_.endpoint(d.from), d.bytes, d.arrival_ms);
    if (!reply)
        return;
    try {
        sim_.send(self_.id, d.from, TransportClass::WideArea, std::move(*reply));
    } catch (const Error&) {
        // sender lost wide-area reachability; nothing to answer to
    }
}

} // namespace gfcx::registry
