#pragma once

#include <string>

#include "gfcx/core/contact_card.hpp"

namespace gfcx {

/// vCard 3.0 with CRLF line endings, folded at 75 octets.
///
/// Name -> FN (+ N), MobileNumber -> TEL;TYPE=CELL, Email -> EMAIL,
/// Organization -> ORG, Title -> TITLE, Address -> ADR (street), Website -> URL,
/// Note -> NOTE. Skype/Facebook/Twitter -> X-GFC-<KIND>; Custom ->
/// X-GFC-CUSTOM;X-LABEL="<label>". Names after the first go to X-GFC-NAME.
/// The classification, if any, becomes CATEGORIES. FN falls back to "Unknown".
std::string export_vcard(const ContactCard& card);

} // namespace gfcx
