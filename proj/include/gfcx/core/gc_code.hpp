#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace gfcx {

inline constexpr std::size_t kMinCodeLength = 2;
inline constexpr std::size_t kMaxCodeLength = 6;
/// Printable ASCII 0x21..0x7E minus ':', '|' and '"'.
inline constexpr std::size_t kCodeAlphabetSize = 91;

/// True for bytes that may appear in a GC code.
constexpr bool is_code_byte(unsigned char c) noexcept
{
    return c >= 0x21 && c <= 0x7E && c != ':' && c != '|' && c != '"';
}

/// The short self-assigned identity a user hands out ("Wa10").
/// Case-sensitive, compared byte-wise.
class GcCode {
public:
    const std::string& text() const noexcept { return text_; }
    std::size_t size() const noexcept { return text_.size(); }

    friend bool operator==(const GcCode&, const GcCode&) = default;
    friend auto operator<=>(const GcCode&, const GcCode&) = default;

private:
    explicit GcCode(std::string text) : text_(std::move(text)) {}
    friend GcCode validate_code(std::string_view raw);

    std::string text_;
};

/// Throws Error{TooShort|TooLong|BadCharacter(offset)}. Length is checked first,
/// then characters left to right.
GcCode validate_code(std::string_view raw);

/// Non-throwing predicate with the same rule as validate_code.
bool is_valid_code(std::string_view raw) noexcept;

} // namespace gfcx

template <>
struct std::hash<gfcx::GcCode> {
    std::size_t operator()(const gfcx::GcCode& c) const noexcept
    {
        return std::hash<std::string>{}(c.text());
    }
};
