#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gfcx/core/id.hpp"

namespace gfcx {

/// UTC seconds.
using Timestamp = std::int64_t;

inline constexpr std::size_t kMaxFieldValueBytes = 512;
inline constexpr std::size_t kMaxFieldsPerProfile = 64;
inline constexpr std::size_t kMaxCustomLabel = 32;
inline constexpr std::size_t kMaxProfileName = 64;

class FieldKind {
public:
    enum class Tag : std::uint8_t {
        MobileNumber,
        Email,
        Skype,
        Facebook,
        Twitter,
        Name,
        Organization,
        Title,
        Address,
        Website,
        Note,
        Custom,
    };

    FieldKind(Tag tag) : tag_(tag) {} // NOLINT(google-explicit-constructor)

    /// Throws Error{InvalidField} for empty, oversized or out-of-alphabet labels.
    static FieldKind custom(std::string_view label);

    Tag tag() const noexcept { return tag_; }
    /// Empty unless tag() == Custom.
    const std::string& label() const noexcept { return label_; }

    /// Wire/file spelling: "MOBILENUMBER", ..., "CUSTOM(<label>)".
    std::string token() const;

    /// Inverse of token(). Unrecognized but well-formed names become Custom(name).
    /// Throws Error{InvalidField}.
    static FieldKind from_token(std::string_view token);

    friend bool operator==(const FieldKind&, const FieldKind&) = default;

private:
    FieldKind(Tag tag, std::string label) : tag_(tag), label_(std::move(label)) {}

    Tag tag_;
    std::string label_;
};

/// Uppercase enum name without label ("TWITTER", "CUSTOM").
std::string_view tag_name(FieldKind::Tag tag) noexcept;

bool is_valid_custom_label(std::string_view label) noexcept;

/// Well-formed UTF-8, 1..512 bytes, no byte below 0x20, no '|'.
bool is_valid_field_value(std::string_view value) noexcept;

/// Nonempty, at most 64 bytes of well-formed UTF-8, no control bytes, no '|'.
bool is_valid_profile_name(std::string_view name) noexcept;

bool is_valid_utf8(std::string_view text) noexcept;

struct ProfileField {
    FieldKind kind;
    std::string value;

    friend bool operator==(const ProfileField&, const ProfileField&) = default;
};

/// One named bundle of personal data (a "GFC" file).
struct Profile {
    Id128 profile_id;
    std::string name;
    std::vector<ProfileField> fields;
    Timestamp created_at = 0;
    Timestamp updated_at = 0;

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// Throws Error{InvalidField|TooManyFields|Validation} describing the first violation.
void validate_profile(const Profile& profile);

} // namespace gfcx
