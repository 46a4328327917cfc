#include "gfcx/registry/client.hpp"

namespace gfcx::registry {

RegistryClient::RegistryClient(exchange::Outbox outbox, netsim::EndpointId registry, exchange::RetryPolicy policy,
                               std::uint64_t tag_prefix)
    : outbox_(std::move(outbox))
    , registry_(registry)
    , policy_(policy)
    , tag_prefix_(tag_prefix)
{
}

void RegistryClient::transmit(Call& c, std::int64_t now_ms)
{
    ++c.sends;
    try {
        outbox_.send(registry_, TransportClass::WideArea, c.bytes);
    } catch (const Error&) {
        // unreachable right now; the retry timer still runs and times out
    }
    outbox_.schedule(now_ms + policy_.interval_ms, c.tag);
}

std::uint32_t RegistryClient::call(RegMessage request, std::int64_t now_ms)
{
    const auto txn = next_txn_++;
    std::visit([&](auto& m) { m.txn = txn; }, request);
    const auto tag = tag_prefix_ | next_tag_++;
    auto& c = calls_[txn];
    c.bytes = encode_reg(request);
    c.tag = tag;
    by_tag_[tag] = txn;
    transmit(c, now_ms);
    return txn;
}

std::optional<RegistryClient::Result> RegistryClient::on_frame(netsim::EndpointId from, const exchange::Frame& frame)
{
    if (from != registry_ || !is_registry_msg_type(frame.msg_type))
        return std::nullopt;
    RegMessage reply = RegError{};
    try {
        reply = decode_reg(frame);
    } catch (const Error&) {
        return std::nullopt;
    }
    const auto it = calls_.find(txn_of(reply));
    if (it == calls_.end())
        return std::nullopt;
    Result r{it->first, std::move(reply), it->second.sends};
    by_tag_.erase(it->second.tag);
    calls_.erase(it);
    return r;
}

std::optional<RegistryClient::Result> RegistryClient::on_timer(std::uint64_t tag, std::int64_t now_ms)
{
    const auto t = by_tag_.find(tag);
    if (t == by_tag_.end())
        return std::nullopt;
    auto& c = calls_.at(t->second);
    if (c.sends <= policy_.max_retries) {
        transmit(c, now_ms);
        return std::nullopt;
    }
    Result r{t->second, std::nullopt, c.sends};
    calls_.erase(t->second);
    by_tag_.erase(t);
    return r;
}

} // namespace gfcx::registry
