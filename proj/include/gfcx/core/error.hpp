#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gfcx {

/// Every failure the library reports, across all modules. The string form
/// (errc_name) is what appears on the wire and in CLI `ERROR|<code>|...` lines.
enum class Errc : std::uint8_t {
    // gfc-core
    TooShort = 1,
    TooLong,
    BadCharacter,
    InvalidRange,
    InvalidField,
    BadMagic,
    UnsupportedVersion,
    MalformedLine,
    TooManyFields,
    // registry
    CodeTaken,
    PhoneRateLimited,
    InvalidOtp,
    Expired,
    UnknownChallenge,
    NotFound,
    // exchange
    Truncated,
    UnknownMsgType,
    PayloadTooLarge,
    MalformedPayload,
    UnknownRoom,
    RoomClosed,
    // netsim
    UnknownEndpoint,
    NotInRange,
    InvalidConfig,
    // node / api
    Unauthorized,
    Validation,
    Busy,
    Timeout,
    Transport,
    Io,
    Refused,
};

std::string_view errc_name(Errc code) noexcept;

/// Reverse of errc_name; returns false for unknown names.
bool errc_from_name(std::string_view name, Errc& out) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string detail);

    /// Error tied to a position: byte offset for codes, 1-based line for GFC documents.
    Error(Errc code, std::string detail, std::size_t position);

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    bool has_position() const noexcept { return has_position_; }
    std::size_t position() const noexcept { return position_; }

private:
    Errc code_;
    std::string detail_;
    std::size_t position_ = 0;
    bool has_position_ = false;
};

} // namespace gfcx
