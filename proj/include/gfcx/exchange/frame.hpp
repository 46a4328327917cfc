#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gfcx::exchange {

inline constexpr std::string_view kFrameMagic = "GFCX";
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 10; // magic(4) version(1) type(1) len(4)
inline constexpr std::size_t kMaxPayload = 65535;

/// magic "GFCX" | version u8 = 1 | msg_type u8 | payload_len u32 BE | payload
struct Frame {
    std::uint8_t msg_type = 0;
    std::string payload;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Throws Error{PayloadTooLarge}.
std::string encode_frame(const Frame& frame);

/// Decodes exactly one frame occupying all of `bytes`. The version is checked
/// before the payload length. Throws Error{BadMagic|UnsupportedVersion|
/// Truncated|PayloadTooLarge|MalformedPayload (trailing bytes)}.
Frame decode_frame(std::string_view bytes);

/// For stream framing: total length of the frame at the front of `buffer`, or
/// nullopt if the header is not complete yet. Header errors throw like decode_frame.
std::optional<std::size_t> peek_frame_length(std::string_view buffer);

} // namespace gfcx::exchange
