#include "gfcx/core/phone.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx {

PhoneNumber parse_phone(std::string_view raw)
{
    if (raw.empty() || raw.front() != '+')
        throw Error(Errc::Validation, "phone number must start with '+'");
    const auto digits = raw.substr(1);
    if (digits.size() < 7 || digits.size() > 15)
        throw Error(Errc::Validation, "phone number must have 7 to 15 digits");
    for (char c : digits) {
        if (c < '0' || c > '9')
            throw Error(Errc::Validation, "phone number may contain only digits after '+'");
    }
    return PhoneNumber(std::string(raw));
}

std::string PhoneNumber::masked() const
{
    std::string out = text_;
    // text_[0] is '+'
    for (std::size_t i = 1; i + 2 < out.size(); ++i)
        out[i] = '*';
    return out;
}

} // namespace gfcx
