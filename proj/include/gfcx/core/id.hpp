#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace gfcx {

/// 16 opaque bytes; used for profile, request, room and challenge ids.
struct Id128 {
    std::array<std::uint8_t, 16> bytes{};

    /// 32 lowercase hex characters.
    std::string hex() const;
    static std::optional<Id128> from_hex(std::string_view text);

    template <class Engine>
    static Id128 random(Engine& engine)
    {
        Id128 id;
        for (std::size_t i = 0; i < id.bytes.size(); i += 8) {
            std::uint64_t word = engine();
            for (std::size_t j = 0; j < 8; ++j)
                id.bytes[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
        }
        return id;
    }

    friend bool operator==(const Id128&, const Id128&) = default;
    friend auto operator<=>(const Id128&, const Id128&) = default;
};

std::string to_hex(const std::uint8_t* data, std::size_t size);

} // namespace gfcx

template <>
struct std::hash<gfcx::Id128> {
    std::size_t operator()(const gfcx::Id128& id) const noexcept
    {
        std::size_t h = 1469598103934665603ull;
        for (auto b : id.bytes)
            h = (h ^ b) * 1099511628211ull;
        return h;
    }
};
