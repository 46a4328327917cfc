#include "gfcx/exchange/message.hpp"

#include "gfcx/core/error.hpp"
#include "gfcx/exchange/bytes.hpp"

namespace gfcx::exchange {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::uint8_t msg_type_of(const Message& m) noexcept
{
    return std::visit(overloaded{
                          [](const Request&) { return std::uint8_t{kRequest}; },
                          [](const Response&) { return std::uint8_t{kResponse}; },
                          [](const Deny&) { return std::uint8_t{kDeny}; },
                          [](const Ack&) { return std::uint8_t{kAck}; },
                          [](const RoomOpen&) { return std::uint8_t{kRoomOpen}; },
                          [](const RoomJoin&) { return std::uint8_t{kRoomJoin}; },
                          [](const RoomCard&) { return std::uint8_t{kRoomCard}; },
                      },
                      m);
}

Frame to_frame(const Message& m)
{
    ByteWriter w;
    std::visit(overloaded{
                   [&](const Request& r) {
                       w.id(r.request_id);
                       w.code(r.target_code);
                       w.optional_code(r.requester_code);
                   },
                   [&](const Response& r) {
                       w.id(r.request_id);
                       w.bytes32(r.gfc_bytes);
                   },
                   [&](const Deny& r) {
                       w.id(r.request_id);
                       w.u8(r.reason);
                   },
                   [&](const Ack& r) { w.id(r.request_id); },
                   [&](const RoomOpen& r) {
                       w.id(r.room_id);
                       w.code(r.host_code);
                   },
                   [&](const RoomJoin& r) {
                       w.id(r.room_id);
                       w.endpoint(r.member_endpoint);
                   },
                   [&](const RoomCard& r) {
                       w.id(r.room_id);
                       w.u32(r.seq);
                       w.bytes32(r.gfc_bytes);
                   },
               },
               m);
    return Frame{msg_type_of(m), w.take()};
}

namespace {

Message parse_payload(std::uint8_t type, ByteReader& r)
{
    switch (type) {
    case kRequest: {
        auto id = r.id();
        auto target = r.code();
        return Request{id, std::move(target), r.optional_code()};
    }
    case kResponse: {
        auto id = r.id();
        return Response{id, r.bytes32()};
    }
    case kDeny: {
        auto id = r.id();
        return Deny{id, r.u8()};
    }
    case kAck:
        return Ack{r.id()};
    case kRoomOpen: {
        auto id = r.id();
        return RoomOpen{id, r.code()};
    }
    case kRoomJoin: {
        auto id = r.id();
        return RoomJoin{id, r.endpoint()};
    }
    case kRoomCard: {
        auto id = r.id();
        auto seq = r.u32();
        return RoomCard{id, seq, r.bytes32()};
    }
    default:
        throw Error(Errc::UnknownMsgType, "message type " + std::to_string(type));
    }
}

} // namespace

Message from_frame(const Frame& frame)
{
    ByteReader r(frame.payload);
    auto out = parse_payload(frame.msg_type, r);
    r.finish();
    return out;
}

std::string encode_message(const Message& m)
{
    return encode_frame(to_frame(m));
}

Message decode_message(std::string_view bytes)
{
    return from_frame(decode_frame(bytes));
}

} // namespace gfcx::exchange
