#include "gfcx/exchange/bytes.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx::exchange {

void ByteWriter::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8)
        out_.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        out_.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void ByteWriter::id(const Id128& v)
{
    out_.append(reinterpret_cast<const char*>(v.bytes.data()), v.bytes.size());
}

void ByteWriter::code(const GcCode& c)
{
    u8(static_cast<std::uint8_t>(c.size()));
    out_.append(c.text());
}

void ByteWriter::optional_code(const std::optional<GcCode>& c)
{
    u8(c ? 1 : 0);
    if (c)
        code(*c);
}

void ByteWriter::bytes32(std::string_view b)
{
    u32(static_cast<std::uint32_t>(b.size()));
    out_.append(b);
}

void ByteWriter::short_string(std::string_view s)
{
    if (s.size() > 255)
        throw Error(Errc::PayloadTooLarge, "short string longer than 255 bytes");
    u8(static_cast<std::uint8_t>(s.size()));
    out_.append(s);
}

void ByteWriter::endpoint(const netsim::Endpoint& ep)
{
    u64(ep.id.value);
    u8(ep.reachability);
}

std::string_view ByteReader::take(std::size_t n)
{
    if (remaining() < n)
        throw Error(Errc::Truncated, "payload ends early");
    const auto out = in_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8()
{
    return static_cast<std::uint8_t>(take(1)[0]);
}

std::uint32_t ByteReader::u32()
{
    const auto b = take(4);
    std::uint32_t v = 0;
    for (char c : b)
        v = (v << 8) | static_cast<std::uint8_t>(c);
    return v;
}

std::uint64_t ByteReader::u64()
{
    const auto b = take(8);
    std::uint64_t v = 0;
    for (char c : b)
        v = (v << 8) | static_cast<std::uint8_t>(c);
    return v;
}

Id128 ByteReader::id()
{
    const auto b = take(16);
    Id128 v;
    for (std::size_t i = 0; i < 16; ++i)
        v.bytes[i] = static_cast<std::uint8_t>(b[i]);
    return v;
}

GcCode ByteReader::code()
{
    const auto len = u8();
    const auto text = take(len);
    if (!is_valid_code(text))
        throw Error(Errc::MalformedPayload, "invalid code in payload");
    return validate_code(text);
}

std::optional<GcCode> ByteReader::optional_code()
{
    const auto flag = u8();
    if (flag == 0)
        return std::nullopt;
    if (flag != 1)
        throw Error(Errc::MalformedPayload, "presence flag must be 0 or 1");
    return code();
}

std::string ByteReader::bytes32()
{
    const auto len = u32();
    return std::string(take(len));
}

std::string ByteReader::short_string()
{
    const auto len = u8();
    return std::string(take(len));
}

netsim::Endpoint ByteReader::endpoint()
{
    netsim::Endpoint ep;
    ep.id.value = u64();
    ep.reachability = u8();
    if (ep.reachability == 0 || (ep.reachability & ~netsim::kReachAll) != 0)
        throw Error(Errc::MalformedPayload, "bad reachability mask");
    return ep;
}

std::string ByteReader::rest()
{
    return std::string(take(remaining()));
}

void ByteReader::finish() const
{
    if (remaining() != 0)
        throw Error(Errc::MalformedPayload, "trailing bytes in payload");
}

} // namespace gfcx::exchange
