#pragma once

#include <string>
#include <string_view>

#include "gfcx/core/profile.hpp"

namespace gfcx {

/// Canonical GFC/1 text document, LF line endings, every line terminated:
///
///     GFC/1
///     ID|<32 hex>|<created_at>|<updated_at>
///     NAME|<name>
///     F|<KIND>|<value>        (zero or more, stored order)
///     END
///
/// Output is deterministic. Precondition: validate_profile(profile) passes.
std::string serialize_gfc(const Profile& profile);

/// Throws Error{BadMagic|UnsupportedVersion|MalformedLine(line)|TooManyFields}.
/// Unknown field kinds come back as Custom.
Profile parse_gfc(std::string_view document);

} // namespace gfcx
