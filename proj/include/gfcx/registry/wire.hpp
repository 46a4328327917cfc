#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "gfcx/core/error.hpp"
#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/id.hpp"
#include "gfcx/core/phone.hpp"
#include "gfcx/core/profile.hpp"
#include "gfcx/exchange/frame.hpp"
#include "gfcx/netsim/endpoint.hpp"
#include "gfcx/registry/registry.hpp"

namespace gfcx::registry {

/// Registry messages ride the GFCX frame. Every payload starts with a u32
/// transaction id chosen by the client and echoed in the reply.
enum RegMsgType : std::uint8_t {
    kRegBegin = 0x20,
    kRegChallenge = 0x21,
    kRegComplete = 0x22,
    kRegOk = 0x23,
    kResolve = 0x24,
    kResolveOk = 0x25,
    kRegReauth = 0x26,
    kRegRevoke = 0x27,
    kRegError = 0x2F,
};

struct RegBegin {
    std::uint32_t txn = 0;
    GcCode code;
    PhoneNumber phone;
    netsim::Endpoint endpoint;
};

/// Reply to RegBegin and RegReauth. Never carries the OTP.
struct RegChallenge {
    std::uint32_t txn = 0;
    Id128 challenge_id;
    GcCode code;
    Timestamp expires_at = 0;
    std::uint8_t attempts_left = 0;
};

struct RegComplete {
    std::uint32_t txn = 0;
    Id128 challenge_id;
    std::string otp;
};

struct RegOk {
    std::uint32_t txn = 0;
    GcCode code;
    BindingStatus status = BindingStatus::Active;
    Timestamp timestamp = 0;
};

struct ResolveReq {
    std::uint32_t txn = 0;
    GcCode code;
};

struct ResolveOk {
    std::uint32_t txn = 0;
    GcCode code;
    netsim::Endpoint endpoint;
    std::string phone_hint;
};

struct RegReauth {
    std::uint32_t txn = 0;
    GcCode code;
};

struct RegRevoke {
    std::uint32_t txn = 0;
    GcCode code;
    std::string otp;
};

/// txn | error code u8 | UTF-8 detail (rest of payload)
struct RegError {
    std::uint32_t txn = 0;
    Errc error = Errc::NotFound;
    std::string detail;
};

using RegMessage = std::variant<RegBegin, RegChallenge, RegComplete, RegOk, ResolveReq, ResolveOk, RegReauth,
                                RegRevoke, RegError>;

std::uint32_t txn_of(const RegMessage& m) noexcept;
bool is_registry_msg_type(std::uint8_t type) noexcept;

std::string encode_reg(const RegMessage& m);
/// Throws Error{UnknownMsgType|Truncated|MalformedPayload} plus frame errors.
RegMessage decode_reg(const exchange::Frame& frame);

} // namespace gfcx::registry
