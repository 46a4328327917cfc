#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfcx/core/error.hpp"

namespace gfcx::node {

/// Local API message types, one per endpoint, carried in GFCX frames.
enum ApiType : std::uint8_t {
    kProfileList = 0x40,
    kProfileCreate = 0x41,
    kProfileUpdate = 0x42,
    kProfileDelete = 0x43,
    kProfileShow = 0x44,
    kPolicyList = 0x45,
    kPolicySet = 0x46,
    kCodeRegister = 0x47,
    kCodeVerify = 0x48,
    kCodeStatus = 0x49,
    kCodeReauth = 0x4A,
    kCodeRevoke = 0x4B,
    kExchange = 0x4C,
    kOpStatus = 0x4D,
    kPendingList = 0x4E,
    kApprove = 0x4F,
    kRefuse = 0x50,
    kRoomHost = 0x51,
    kRoomJoin = 0x52,
    kRoomCast = 0x53,
    kRoomStatus = 0x54,
    kContactsList = 0x55,
    kContactsSearch = 0x56,
    kClassify = 0x57,
    kExportVcard = 0x58,
    kContactShow = 0x59,
    kApiOk = 0x5E,
    kApiError = 0x5F,
};

std::string_view api_type_name(std::uint8_t type) noexcept;
bool is_api_request_type(std::uint8_t type) noexcept;

/// Payload body: LF-terminated lines of `KEY|value...`.
class ApiDoc {
public:
    ApiDoc() = default;

    ApiDoc& add(std::string_view key, std::string_view value);
    ApiDoc& add_line(std::string line);

    const std::vector<std::string>& lines() const noexcept { return lines_; }
    /// Text after "KEY|" on the first line with that key.
    std::optional<std::string> value(std::string_view key) const;
    std::vector<std::string> values(std::string_view key) const;
    bool empty() const noexcept { return lines_.empty(); }

    std::string text() const;
    /// Throws Error{MalformedPayload} for an unterminated last line.
    static ApiDoc parse(std::string_view text);

    friend bool operator==(const ApiDoc&, const ApiDoc&) = default;

private:
    std::vector<std::string> lines_;
};

struct ApiRequest {
    std::uint8_t type = 0;
    std::string token;
    ApiDoc body;
};

/// First payload line is TOKEN|<hex>.
std::string encode_api_request(std::uint8_t type, std::string_view token, const ApiDoc& body);
/// Throws Error{Unauthorized} when the token line is missing, frame errors otherwise.
ApiRequest decode_api_request(std::string_view bytes);

struct ApiReply {
    bool ok = false;
    ApiDoc doc;          // when ok
    Errc error = Errc::Io;
    std::string detail;  // when !ok

    /// The single `ERROR|<code>|<detail>` line for failures.
    std::string error_line() const;
};

std::string encode_api_ok(const ApiDoc& doc);
std::string encode_api_error(Errc code, std::string_view detail);
/// Throws Error{MalformedPayload} (and frame errors).
ApiReply decode_api_reply(std::string_view bytes);

} // namespace gfcx::node
