#include "gfcx/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "gfcx/core/error.hpp"

namespace gfcx::netsim {

Simulator::Simulator(NetConfig config)
    : config_(config)
    , engine_(config.seed)
{
    config_.validate();
}

Endpoint Simulator::add_endpoint(std::uint8_t reachability)
{
    Endpoint ep{EndpointId{next_endpoint_++}, reachability};
    endpoints_.emplace(ep.id, ep);
    return ep;
}

bool Simulator::has_endpoint(EndpointId id) const
{
    return endpoints_.count(id) != 0;
}

Endpoint Simulator::endpoint(EndpointId id) const
{
    const auto it = endpoints_.find(id);
    if (it == endpoints_.end())
        throw Error(Errc::UnknownEndpoint, "no endpoint " + id.hex());
    return it->second;
}

void Simulator::attach(EndpointId id, Handler* handler)
{
    if (!has_endpoint(id))
        throw Error(Errc::UnknownEndpoint, "no endpoint " + id.hex());
    handlers_[id] = handler;
}

void Simulator::detach(EndpointId id)
{
    handlers_.erase(id);
}

void Simulator::join_room(const RoomKey& room, EndpointId id)
{
    if (!has_endpoint(id))
        throw Error(Errc::UnknownEndpoint, "no endpoint " + id.hex());
    rooms_[room].insert(id);
}

void Simulator::leave_room(const RoomKey& room, EndpointId id)
{
    const auto it = rooms_.find(room);
    if (it == rooms_.end())
        return;
    it->second.erase(id);
    if (it->second.empty())
        rooms_.erase(it);
}

bool Simulator::share_room(EndpointId a, EndpointId b) const
{
    for (const auto& [key, members] : rooms_) {
        if (members.count(a) && members.count(b))
            return true;
    }
    return false;
}

std::vector<EndpointId> Simulator::room_members(const RoomKey& room) const
{
    const auto it = rooms_.find(room);
    if (it == rooms_.end())
        return {};
    return {it->second.begin(), it->second.end()};
}

void Simulator::advertise(EndpointId id, std::string label)
{
    adverts_[id] = std::move(label);
}

std::vector<std::pair<EndpointId, std::string>> Simulator::neighbours(EndpointId id) const
{
    std::set<EndpointId> seen;
    for (const auto& [key, members] : rooms_) {
        if (!members.count(id))
            continue;
        for (auto m : members) {
            if (m != id)
                seen.insert(m);
        }
    }
    std::vector<std::pair<EndpointId, std::string>> out;
    for (auto m : seen) {
        const auto it = adverts_.find(m);
        out.emplace_back(m, it == adverts_.end() ? std::string{} : it->second);
    }
    return out;
}

double Simulator::unit_draw()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void Simulator::set_link(TransportClass transport, const LinkProfile& profile)
{
    NetConfig next = config_;
    (transport == TransportClass::Proximity ? next.proximity : next.wide_area) = profile;
    next.validate();
    config_ = next;
}

const LinkProfile& Simulator::link(TransportClass t) const noexcept
{
    return t == TransportClass::Proximity ? config_.proximity : config_.wide_area;
}

SendResult Simulator::send(EndpointId from, EndpointId to, TransportClass transport, std::string bytes)
{
    const auto src = endpoints_.find(from);
    const auto dst = endpoints_.find(to);
    if (src == endpoints_.end())
        throw Error(Errc::UnknownEndpoint, "no endpoint " + from.hex());
    if (dst == endpoints_.end())
        throw Error(Errc::UnknownEndpoint, "no endpoint " + to.hex());
    if (!src->second.reaches(transport) || !dst->second.reaches(transport))
        throw Error(Errc::NotInRange, "endpoint lacks " + std::string(transport_name(transport)) + " reachability");
    if (transport == TransportClass::Proximity && !share_room(from, to))
        throw Error(Errc::NotInRange, "proximity send between endpoints in different rooms");

    const auto& lp = link(transport);
    TraceRecord rec{now_ms_, from, to, transport, std::nullopt, bytes};
    if (unit_draw() < lp.loss_rate) {
        trace_.push_back(std::move(rec));
        return {false, 0};
    }
    const std::int64_t span = lp.latency_max_ms - lp.latency_min_ms;
    const auto offset = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(unit_draw() * static_cast<double>(span + 1))), span);
    std::int64_t arrival = now_ms_ + lp.latency_min_ms + offset;
    auto& last = last_arrival_[{from, to}];
    arrival = std::max(arrival, last);
    last = arrival;

    rec.arrival_ms = arrival;
    trace_.push_back(std::move(rec));

    Event ev{arrival, next_seq_, false, 0, Delivery{next_seq_, now_ms_, arrival, from, to, transport, std::move(bytes)}};
    ++next_seq_;
    queue_.push(std::move(ev));
    return {true, arrival};
}

void Simulator::schedule_timer(EndpointId id, std::int64_t at_ms, std::uint64_t tag)
{
    Event ev{std::max(at_ms, now_ms_), next_seq_++, true, tag, Delivery{}};
    ev.delivery.to = id;
    queue_.push(std::move(ev));
}

std::optional<std::int64_t> Simulator::next_event_ms() const
{
    if (queue_.empty())
        return std::nullopt;
    return queue_.top().time_ms;
}

void Simulator::dispatch(Event& ev, std::vector<Delivery>* out)
{
    now_ms_ = std::max(now_ms_, ev.time_ms);
    const auto h = handlers_.find(ev.delivery.to);
    if (ev.is_timer) {
        if (h != handlers_.end() && h->second)
            h->second->on_timer(ev.tag, now_ms_);
        return;
    }
    if (h != handlers_.end() && h->second)
        h->second->on_frame(ev.delivery);
    if (out)
        out->push_back(std::move(ev.delivery));
}

std::vector<Delivery> Simulator::advance(std::int64_t clock_ms)
{
    std::vector<Delivery> delivered;
    while (!queue_.empty() && queue_.top().time_ms <= clock_ms) {
        Event ev = queue_.top();
        queue_.pop();
        dispatch(ev, &delivered);
    }
    now_ms_ = std::max(now_ms_, clock_ms);
    return delivered;
}

bool Simulator::step(std::int64_t limit_ms)
{
    if (queue_.empty() || queue_.top().time_ms > limit_ms) {
        now_ms_ = std::max(now_ms_, limit_ms);
        return false;
    }
    Event ev = queue_.top();
    queue_.pop();
    dispatch(ev, nullptr);
    return true;
}

void Simulator::write_trace_csv(std::ostream& out) const
{
    out << "send_time,from,to,class,arrival_time_or_DROP\n";
    for (const auto& r : trace_) {
        out << r.send_time_ms << ',' << r.from.hex() << ',' << r.to.hex() << ',' << transport_name(r.transport) << ',';
        if (r.arrival_ms)
            out << *r.arrival_ms;
        else
            out << "DROP";
        out << '\n';
    }
}

} // namespace gfcx::netsim
