#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/id.hpp"
#include "gfcx/exchange/frame.hpp"
#include "gfcx/netsim/endpoint.hpp"

namespace gfcx::exchange {

enum MsgType : std::uint8_t {
    kRequest = 0x01,
    kResponse = 0x02,
    kDeny = 0x03,
    kAck = 0x04,
    kRoomOpen = 0x10,
    kRoomJoin = 0x11,
    kRoomCard = 0x12,
};

enum DenyReason : std::uint8_t {
    kDenyRefused = 0x01,
    kDenyUnknownCode = 0x02,
    kDenyBusy = 0x03,
};

struct Request {
    Id128 request_id;
    GcCode target_code;
    std::optional<GcCode> requester_code;
    friend bool operator==(const Request&, const Request&) = default;
};

struct Response {
    Id128 request_id;
    std::string gfc_bytes;
    friend bool operator==(const Response&, const Response&) = default;
};

struct Deny {
    Id128 request_id;
    std::uint8_t reason = kDenyRefused;
    friend bool operator==(const Deny&, const Deny&) = default;
};

/// Request received and parked for the owner's approval; the requester stops
/// retrying and waits for a later RESPONSE or DENY.
struct Ack {
    Id128 request_id;
    friend bool operator==(const Ack&, const Ack&) = default;
};

/// Host announcement; sent back to every member that joins.
struct RoomOpen {
    Id128 room_id;
    GcCode host_code;
    friend bool operator==(const RoomOpen&, const RoomOpen&) = default;
};

struct RoomJoin {
    Id128 room_id;
    netsim::Endpoint member_endpoint;
    friend bool operator==(const RoomJoin&, const RoomJoin&) = default;
};

struct RoomCard {
    Id128 room_id;
    std::uint32_t seq = 0;
    std::string gfc_bytes;
    friend bool operator==(const RoomCard&, const RoomCard&) = default;
};

using Message = std::variant<Request, Response, Deny, Ack, RoomOpen, RoomJoin, RoomCard>;

std::uint8_t msg_type_of(const Message& m) noexcept;

Frame to_frame(const Message& m);
/// Throws Error{UnknownMsgType|Truncated|MalformedPayload}.
Message from_frame(const Frame& frame);

/// encode_frame(to_frame(m)); deterministic.
std::string encode_message(const Message& m);
/// from_frame(decode_frame(bytes)).
Message decode_message(std::string_view bytes);

} // namespace gfcx::exchange
