#include "gfcx/core/contact_card.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx {

std::string_view transport_name(TransportClass t) noexcept
{
    return t == TransportClass::Proximity ? "PROXIMITY" : "WIDEAREA";
}

TransportClass transport_from_name(std::string_view name)
{
    if (name == "PROXIMITY")
        return TransportClass::Proximity;
    if (name == "WIDEAREA")
        return TransportClass::WideArea;
    throw Error(Errc::Validation, "unknown transport class '" + std::string(name) + "'");
}

} // namespace gfcx
