#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace gfcx {

/// E.164-style number: '+' followed by 7..15 decimal digits.
class PhoneNumber {
public:
    const std::string& text() const noexcept { return text_; }

    /// All digits but the last two replaced by '*', leading '+' kept.
    std::string masked() const;

    friend bool operator==(const PhoneNumber&, const PhoneNumber&) = default;
    friend auto operator<=>(const PhoneNumber&, const PhoneNumber&) = default;

private:
    explicit PhoneNumber(std::string text) : text_(std::move(text)) {}
    friend PhoneNumber parse_phone(std::string_view raw);

    std::string text_;
};

/// Throws Error{Validation}.
PhoneNumber parse_phone(std::string_view raw);

} // namespace gfcx
