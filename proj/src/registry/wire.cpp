#include "gfcx/registry/wire.hpp"

#include "gfcx/exchange/bytes.hpp"

namespace gfcx::registry {

namespace {

using exchange::ByteReader;
using exchange::ByteWriter;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

PhoneNumber read_phone(ByteReader& r)
{
    const auto text = r.short_string();
    try {
        return parse_phone(text);
    } catch (const Error&) {
        throw Error(Errc::MalformedPayload, "invalid phone number in payload");
    }
}

BindingStatus read_status(ByteReader& r)
{
    const auto s = r.u8();
    if (s < 1 || s > 3)
        throw Error(Errc::MalformedPayload, "bad binding status");
    return static_cast<BindingStatus>(s);
}

RegMessage parse(std::uint8_t type, ByteReader& r)
{
    const auto txn = r.u32();
    switch (type) {
    case kRegBegin: {
        auto code = r.code();
        auto phone = read_phone(r);
        return RegBegin{txn, std::move(code), std::move(phone), r.endpoint()};
    }
    case kRegChallenge: {
        auto id = r.id();
        auto code = r.code();
        auto expires = static_cast<Timestamp>(r.u64());
        return RegChallenge{txn, id, std::move(code), expires, r.u8()};
    }
    case kRegComplete: {
        auto id = r.id();
        return RegComplete{txn, id, r.short_string()};
    }
    case kRegOk: {
        auto code = r.code();
        auto status = read_status(r);
        return RegOk{txn, std::move(code), status, static_cast<Timestamp>(r.u64())};
    }
    case kResolve:
        return ResolveReq{txn, r.code()};
    case kResolveOk: {
        auto code = r.code();
        auto ep = r.endpoint();
        return ResolveOk{txn, std::move(code), ep, r.short_string()};
    }
    case kRegReauth:
        return RegReauth{txn, r.code()};
    case kRegRevoke: {
        auto code = r.code();
        return RegRevoke{txn, std::move(code), r.short_string()};
    }
    case kRegError: {
        const auto raw = r.u8();
        std::string_view name = errc_name(static_cast<Errc>(raw));
        if (name == "Unknown")
            throw Error(Errc::MalformedPayload, "unknown error code");
        return RegError{txn, static_cast<Errc>(raw), r.rest()};
    }
    default:
        throw Error(Errc::UnknownMsgType, "registry message type " + std::to_string(type));
    }
}

} // namespace

std::uint32_t txn_of(const RegMessage& m) noexcept
{
    return std::visit([](const auto& v) { return v.txn; }, m);
}

bool is_registry_msg_type(std::uint8_t type) noexcept
{
    return (type >= kRegBegin && type <= kRegRevoke) || type == kRegError;
}

std::string encode_reg(const RegMessage& m)
{
    ByteWriter w;
    w.u32(txn_of(m));
    const std::uint8_t type = std::visit(
        overloaded{
            [&](const RegBegin& v) {
                w.code(v.code);
                w.short_string(v.phone.text());
                w.endpoint(v.endpoint);
                return std::uint8_t{kRegBegin};
            },
            [&](const RegChallenge& v) {
                w.id(v.challenge_id);
                w.code(v.code);
                w.u64(static_cast<std::uint64_t>(v.expires_at));
                w.u8(v.attempts_left);
                return std::uint8_t{kRegChallenge};
            },
            [&](const RegComplete& v) {
                w.id(v.challenge_id);
                w.short_string(v.otp);
                return std::uint8_t{kRegComplete};
            },
            [&](const RegOk& v) {
                w.code(v.code);
                w.u8(static_cast<std::uint8_t>(v.status));
                w.u64(static_cast<std::uint64_t>(v.timestamp));
                return std::uint8_t{kRegOk};
            },
            [&](const ResolveReq& v) {
                w.code(v.code);
                return std::uint8_t{kResolve};
            },
            [&](const ResolveOk& v) {
                w.code(v.code);
                w.endpoint(v.endpoint);
                w.short_string(v.phone_hint);
                return std::uint8_t{kResolveOk};
            },
            [&](const RegReauth& v) {
                w.code(v.code);
                return std::uint8_t{kRegReauth};
            },
            [&](const RegRevoke& v) {
                w.code(v.code);
                w.short_string(v.otp);
                return std::uint8_t{kRegRevoke};
            },
            [&](const RegError& v) {
                w.u8(static_cast<std::uint8_t>(v.error));
                w.raw(v.detail);
                return std::uint8_t{kRegError};
            },
        },
        m);
    return exchange::encode_frame(exchange::Frame{type, w.take()});
}

RegMessage decode_reg(const exchange::Frame& frame)
{
    ByteReader r(frame.payload);
    auto m = parse(frame.msg_type, r);
    r.finish();
    return m;
}

} // namespace gfcx::registry
