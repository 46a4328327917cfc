#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "gfcx/core/profile.hpp"
#include "gfcx/exchange/message.hpp"
#include "gfcx/exchange/outbox.hpp"

namespace gfcx::exchange {

struct DeliveryReport {
    Id128 room_id;
    std::uint32_t seq = 0;
    std::vector<std::pair<netsim::EndpointId, bool>> per_member;

    std::size_t total() const noexcept { return per_member.size(); }
    std::size_t delivered() const noexcept;
};

/// Host side of one-to-many broadcast sessions. Each broadcast sends a single
/// ROOM_CARD (same bytes, next seq) to every joined member over Proximity.
class RoomHost {
public:
    explicit RoomHost(std::uint64_t seed) : rng_(seed) {}

    Id128 open_room(const GcCode& host_code, std::int64_t now_ms);
    /// Throws Error{UnknownRoom|RoomClosed}. Joining twice is a no-op.
    void join_room(const Id128& room_id, const netsim::Endpoint& member);
    void close_room(const Id128& room_id);

    /// Throws Error{UnknownRoom|RoomClosed}. Members that cannot be reached count as lost.
    DeliveryReport broadcast_room(const Id128& room_id, const Profile& profile, const Outbox& outbox);

    bool is_open(const Id128& room_id) const;
    std::vector<netsim::Endpoint> members(const Id128& room_id) const;
    const GcCode& host_code(const Id128& room_id) const;

private:
    struct Room {
        GcCode host_code;
        std::int64_t opened_at_ms;
        bool open = true;
        std::uint32_t next_seq = 1;
        std::vector<netsim::Endpoint> members;
    };
    Room& get_open(const Id128& room_id);
    const Room& get(const Id128& room_id) const;

    std::mt19937_64 rng_;
    std::map<Id128, Room> rooms_;
};

} // namespace gfcx::exchange
