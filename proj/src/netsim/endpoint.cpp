#include "gfcx/netsim/endpoint.hpp"

#include <charconv>

namespace gfcx::netsim {

std::string EndpointId::hex() const
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i)
        out[15 - i] = kDigits[(value >> (4 * i)) & 0xF];
    return out;
}

std::optional<EndpointId> EndpointId::from_hex(std::string_view text)
{
    if (text.size() != 16)
        return std::nullopt;
    for (char c : text) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
            return std::nullopt;
    }
    EndpointId id;
    std::from_chars(text.data(), text.data() + text.size(), id.value, 16);
    return id;
}

} // namespace gfcx::netsim
