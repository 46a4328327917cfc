#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/id.hpp"
#include "gfcx/netsim/endpoint.hpp"

namespace gfcx::exchange {

/// Big-endian payload builder. Codes are u8-length-prefixed, byte strings
/// u32-length-prefixed, ids raw 16 bytes, optionals carry a 1-byte presence flag.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void id(const Id128& v);
    void code(const GcCode& c);
    void optional_code(const std::optional<GcCode>& c);
    void bytes32(std::string_view b);
    void short_string(std::string_view s); // u8 length
    void endpoint(const netsim::Endpoint& ep);
    void raw(std::string_view b) { out_.append(b); }

    std::string take() { return std::move(out_); }
    std::size_t size() const noexcept { return out_.size(); }

private:
    std::string out_;
};

/// Throws Error{Truncated} on short input and Error{MalformedPayload} on
/// values that violate their type (bad code, bad flag).
class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    Id128 id();
    GcCode code();
    std::optional<GcCode> optional_code();
    std::string bytes32();
    std::string short_string();
    netsim::Endpoint endpoint();
    std::string rest();

    std::size_t remaining() const noexcept { return in_.size() - pos_; }
    /// Throws MalformedPayload if unread bytes remain.
    void finish() const;

private:
    std::string_view take(std::size_t n);

    std::string_view in_;
    std::size_t pos_ = 0;
};

} // namespace gfcx::exchange
