#include "gfcx/exchange/room.hpp"

#include <algorithm>

#include "gfcx/core/error.hpp"
#include "gfcx/core/gfc_format.hpp"

namespace gfcx::exchange {

std::size_t DeliveryReport::delivered() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(per_member.begin(), per_member.end(), [](const auto& m) { return m.second; }));
}

Id128 RoomHost::open_room(const GcCode& host_code, std::int64_t now_ms)
{
    Id128 id = Id128::random(rng_);
    while (rooms_.count(id))
        id = Id128::random(rng_);
    rooms_.emplace(id, Room{host_code, now_ms, true, 1, {}});
    return id;
}

const RoomHost::Room& RoomHost::get(const Id128& room_id) const
{
    const auto it = rooms_.find(room_id);
    if (it == rooms_.end())
        throw Error(Errc::UnknownRoom, "no room " + room_id.hex());
    return it->second;
}

RoomHost::Room& RoomHost::get_open(const Id128& room_id)
{
    auto& room = const_cast<Room&>(get(room_id));
    if (!room.open)
        throw Error(Errc::RoomClosed, "room " + room_id.hex() + " is closed");
    return room;
}

void RoomHost::join_room(const Id128& room_id, const netsim::Endpoint& member)
{
    auto& room = get_open(room_id);
    const bool present = std::any_of(room.members.begin(), room.members.end(),
                                     [&](const netsim::Endpoint& m) { return m.id == member.id; });
    if (!present)
        room.members.push_back(member);
}

void RoomHost::close_room(const Id128& room_id)
{
    const_cast<Room&>(get(room_id)).open = false;
}

DeliveryReport RoomHost::broadcast_room(const Id128& room_id, const Profile& profile, const Outbox& outbox)
{
    auto& room = get_open(room_id);
    DeliveryReport report{room_id, 0, {}};
    if (room.members.empty())
        return report;
    report.seq = room.next_seq++;
    const auto bytes = encode_message(RoomCard{room_id, report.seq, serialize_gfc(profile)});
    report.per_member.reserve(room.members.size());
    for (const auto& m : room.members) {
        bool ok = false;
        try {
            ok = outbox.send(m.id, TransportClass::Proximity, bytes);
        } catch (const Error&) {
            ok = false;
        }
        report.per_member.emplace_back(m.id, ok);
    }
    return report;
}

bool RoomHost::is_open(const Id128& room_id) const
{
    const auto it = rooms_.find(room_id);
    return it != rooms_.end() && it->second.open;
}

std::vector<netsim::Endpoint> RoomHost::members(const Id128& room_id) const
{
    return get(room_id).members;
}

const GcCode& RoomHost::host_code(const Id128& room_id) const
{
    return get(room_id).host_code;
}

} // namespace gfcx::exchange
