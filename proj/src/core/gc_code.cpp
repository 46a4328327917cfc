#include "gfcx/core/gc_code.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx {

GcCode validate_code(std::string_view raw)
{
    if (raw.size() < kMinCodeLength)
        throw Error(Errc::TooShort, "code must have at least 2 characters");
    if (raw.size() > kMaxCodeLength)
        throw Error(Errc::TooLong, "code must have at most 6 characters");
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!is_code_byte(static_cast<unsigned char>(raw[i])))
            throw Error(Errc::BadCharacter, "disallowed byte at offset " + std::to_string(i), i);
    }
    return GcCode(std::string(raw));
}

bool is_valid_code(std::string_view raw) noexcept
{
    if (raw.size() < kMinCodeLength || raw.size() > kMaxCodeLength)
        return false;
    for (char c : raw) {
        if (!is_code_byte(static_cast<unsigned char>(c)))
            return false;
    }
    return true;
}

} // namespace gfcx
