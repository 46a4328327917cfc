#include "gfcx/core/error.hpp"

#include <array>
#include <utility>

namespace gfcx {

namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 31> kNames{{
    {Errc::TooShort, "TooShort"},
    {Errc::TooLong, "TooLong"},
    {Errc::BadCharacter, "BadCharacter"},
    {Errc::InvalidRange, "InvalidRange"},
    {Errc::InvalidField, "InvalidField"},
    {Errc::BadMagic, "BadMagic"},
    {Errc::UnsupportedVersion, "UnsupportedVersion"},
    {Errc::MalformedLine, "MalformedLine"},
    {Errc::TooManyFields, "TooManyFields"},
    {Errc::CodeTaken, "CodeTaken"},
    {Errc::PhoneRateLimited, "PhoneRateLimited"},
    {Errc::InvalidOtp, "InvalidOtp"},
    {Errc::Expired, "Expired"},
    {Errc::UnknownChallenge, "UnknownChallenge"},
    {Errc::NotFound, "NotFound"},
    {Errc::Truncated, "Truncated"},
    {Errc::UnknownMsgType, "UnknownMsgType"},
    {Errc::PayloadTooLarge, "PayloadTooLarge"},
    {Errc::MalformedPayload, "MalformedPayload"},
    {Errc::UnknownRoom, "UnknownRoom"},
    {Errc::RoomClosed, "RoomClosed"},
    {Errc::UnknownEndpoint, "UnknownEndpoint"},
    {Errc::NotInRange, "NotInRange"},
    {Errc::InvalidConfig, "InvalidConfig"},
    {Errc::Unauthorized, "Unauthorized"},
    {Errc::Validation, "Validation"},
    {Errc::Busy, "Busy"},
    {Errc::Timeout, "Timeout"},
    {Errc::Transport, "Transport"},
    {Errc::Io, "Io"},
    {Errc::Refused, "Refused"},
}};

std::string what_text(Errc code, const std::string& detail)
{
    std::string out{errc_name(code)};
    if (!detail.empty()) {
        out += ": ";
        out += detail;
    }
    return out;
}

} // namespace

std::string_view errc_name(Errc code) noexcept
{
    for (const auto& [c, name] : kNames) {
        if (c == code)
            return name;
    }
    return "Unknown";
}

bool errc_from_name(std::string_view name, Errc& out) noexcept
{
    for (const auto& [c, n] : kNames) {
        if (n == name) {
            out = c;
            return true;
        }
    }
    return false;
}

Error::Error(Errc code, std::string detail)
    : std::runtime_error(what_text(code, detail))
    , code_(code)
    , detail_(std::move(detail))
{
}

Error::Error(Errc code, std::string detail, std::size_t position)
    : std::runtime_error(what_text(code, detail))
    , code_(code)
    , detail_(std::move(detail))
    , position_(position)
    , has_position_(true)
{
}

} // namespace gfcx
