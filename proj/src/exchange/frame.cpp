#include "gfcx/exchange/frame.hpp"

#include "gfcx/core/error.hpp"
#include "gfcx/exchange/bytes.hpp"

namespace gfcx::exchange {

std::string encode_frame(const Frame& frame)
{
    if (frame.payload.size() > kMaxPayload)
        throw Error(Errc::PayloadTooLarge, "payload of " + std::to_string(frame.payload.size()) + " bytes exceeds 65535");
    ByteWriter w;
    w.raw(kFrameMagic);
    w.u8(kFrameVersion);
    w.u8(frame.msg_type);
    w.u32(static_cast<std::uint32_t>(frame.payload.size()));
    w.raw(frame.payload);
    return w.take();
}

std::optional<std::size_t> peek_frame_length(std::string_view buffer)
{
    const auto magic_len = std::min(buffer.size(), kFrameMagic.size());
    if (buffer.substr(0, magic_len) != kFrameMagic.substr(0, magic_len))
        throw Error(Errc::BadMagic, "frame does not start with GFCX");
    if (buffer.size() < 5)
        return std::nullopt;
    if (static_cast<std::uint8_t>(buffer[4]) != kFrameVersion)
        throw Error(Errc::UnsupportedVersion, "frame version " + std::to_string(static_cast<std::uint8_t>(buffer[4])));
    if (buffer.size() < kFrameHeaderSize)
        return std::nullopt;
    ByteReader r(buffer.substr(6, 4));
    const auto len = r.u32();
    if (len > kMaxPayload)
        throw Error(Errc::PayloadTooLarge, "declared payload of " + std::to_string(len) + " bytes");
    return kFrameHeaderSize + len;
}

Frame decode_frame(std::string_view bytes)
{
    const auto total = peek_frame_length(bytes);
    if (!total || bytes.size() < *total)
        throw Error(Errc::Truncated, "frame shorter than its header declares");
    if (bytes.size() > *total)
        throw Error(Errc::MalformedPayload, "bytes after the end of the frame");
    return Frame{static_cast<std::uint8_t>(bytes[5]), std::string(bytes.substr(kFrameHeaderSize))};
}

} // namespace gfcx::exchange
