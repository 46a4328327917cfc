#include "gfcx/core/profile.hpp"

#include <array>

#include "gfcx/core/error.hpp"
#include "gfcx/core/gc_code.hpp"

namespace gfcx {

namespace {

constexpr std::array<std::string_view, 12> kTagNames{
    "MOBILENUMBER", "EMAIL", "SKYPE", "FACEBOOK", "TWITTER", "NAME",
    "ORGANIZATION", "TITLE", "ADDRESS", "WEBSITE", "NOTE", "CUSTOM",
};

} // namespace

std::string_view tag_name(FieldKind::Tag tag) noexcept
{
    return kTagNames[static_cast<std::size_t>(tag)];
}

bool is_valid_utf8(std::string_view text) noexcept
{
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= text.size())
            return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80)
                return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000))
            return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += extra + 1;
    }
    return true;
}

bool is_valid_custom_label(std::string_view label) noexcept
{
    if (label.empty() || label.size() > kMaxCustomLabel)
        return false;
    for (char c : label) {
        const auto u = static_cast<unsigned char>(c);
        if (u != ' ' && !is_code_byte(u))
            return false;
    }
    return true;
}

bool is_valid_field_value(std::string_view value) noexcept
{
    if (value.empty() || value.size() > kMaxFieldValueBytes)
        return false;
    for (char c : value) {
        if (static_cast<unsigned char>(c) < 0x20 || c == '|')
            return false;
    }
    return is_valid_utf8(value);
}

bool is_valid_profile_name(std::string_view name) noexcept
{
    if (name.empty() || name.size() > kMaxProfileName)
        return false;
    for (char c : name) {
        if (static_cast<unsigned char>(c) < 0x20 || c == '|')
            return false;
    }
    return is_valid_utf8(name);
}

FieldKind FieldKind::custom(std::string_view label)
{
    if (!is_valid_custom_label(label))
        throw Error(Errc::InvalidField, "custom label must be 1-32 code characters or spaces");
    return FieldKind(Tag::Custom, std::string(label));
}

std::string FieldKind::token() const
{
    if (tag_ == Tag::Custom)
        return "CUSTOM(" + label_ + ")";
    return std::string(tag_name(tag_));
}

FieldKind FieldKind::from_token(std::string_view token)
{
    for (std::size_t i = 0; i + 1 < kTagNames.size(); ++i) {
        if (token == kTagNames[i])
            return FieldKind(static_cast<Tag>(i));
    }
    constexpr std::string_view prefix = "CUSTOM(";
    if (token.size() > prefix.size() && token.substr(0, prefix.size()) == prefix && token.back() == ')')
        return custom(token.substr(prefix.size(), token.size() - prefix.size() - 1));
    // unknown kinds are kept under their own name
    return custom(token);
}

void validate_profile(const Profile& profile)
{
    if (!is_valid_profile_name(profile.name))
        throw Error(Errc::Validation, "profile name must be 1-64 bytes without '|' or control characters");
    if (profile.fields.size() > kMaxFieldsPerProfile)
        throw Error(Errc::TooManyFields, "a profile holds at most 64 fields");
    for (std::size_t i = 0; i < profile.fields.size(); ++i) {
        const auto& f = profile.fields[i];
        if (f.kind.tag() == FieldKind::Tag::Custom && !is_valid_custom_label(f.kind.label()))
            throw Error(Errc::InvalidField, "field " + std::to_string(i) + " has an invalid custom label");
        if (!is_valid_field_value(f.value))
            throw Error(Errc::InvalidField, "field " + std::to_string(i) + " value is empty, too long or has forbidden bytes");
    }
    if (profile.created_at < 0 || profile.updated_at < 0)
        throw Error(Errc::Validation, "timestamps must be non-negative");
}

} // namespace gfcx
