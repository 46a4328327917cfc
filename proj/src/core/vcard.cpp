#include "gfcx/core/vcard.hpp"

#include <string_view>

namespace gfcx {

namespace {

constexpr std::size_t kFoldWidth = 75;

std::string escape_text(std::string_view value)
{
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        if (c == '\\' || c == ',' || c == ';')
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// Appends `line` folded so that no physical line exceeds 75 octets and no
// UTF-8 sequence is split.
void append_folded(std::string& out, std::string_view line)
{
    std::size_t limit = kFoldWidth;
    while (line.size() > limit) {
        std::size_t cut = limit;
        while (cut > 0 && (static_cast<unsigned char>(line[cut]) & 0xC0) == 0x80)
            --cut;
        out.append(line.substr(0, cut));
        out += "\r\n ";
        line.remove_prefix(cut);
        limit = kFoldWidth - 1; // continuation lines carry the leading space
    }
    out.append(line);
    out += "\r\n";
}

} // namespace

std::string export_vcard(const ContactCard& card)
{
    const auto& fields = card.profile_snapshot.fields;

    std::string display = "Unknown";
    bool have_name = false;
    for (const auto& f : fields) {
        if (f.kind.tag() == FieldKind::Tag::Name) {
            display = f.value;
            have_name = true;
            break;
        }
    }

    std::string out;
    append_folded(out, "BEGIN:VCARD");
    append_folded(out, "VERSION:3.0");
    append_folded(out, "FN:" + escape_text(display));
    append_folded(out, "N:" + (have_name ? escape_text(display) : std::string()) + ";;;;");

    bool first_name = true;
    for (const auto& f : fields) {
        using Tag = FieldKind::Tag;
        switch (f.kind.tag()) {
        case Tag::Name:
            if (first_name) {
                first_name = false;
                break;
            }
            append_folded(out, "X-GFC-NAME:" + escape_text(f.value));
            break;
        case Tag::MobileNumber:
            append_folded(out, "TEL;TYPE=CELL:" + f.value);
            break;
        case Tag::Email:
            append_folded(out, "EMAIL:" + escape_text(f.value));
            break;
        case Tag::Organization:
            append_folded(out, "ORG:" + escape_text(f.value));
            break;
        case Tag::Title:
            append_folded(out, "TITLE:" + escape_text(f.value));
            break;
        case Tag::Address:
            append_folded(out, "ADR:;;" + escape_text(f.value) + ";;;;");
            break;
        case Tag::Website:
            append_folded(out, "URL:" + f.value);
            break;
        case Tag::Note:
            append_folded(out, "NOTE:" + escape_text(f.value));
            break;
        case Tag::Skype:
        case Tag::Facebook:
        case Tag::Twitter:
            append_folded(out, "X-GFC-" + std::string(tag_name(f.kind.tag())) + ":" + escape_text(f.value));
            break;
        case Tag::Custom:
            append_folded(out, "X-GFC-CUSTOM;X-LABEL=\"" + f.kind.label() + "\":" + escape_text(f.value));
            break;
        }
    }
    if (card.classification && !card.classification->empty())
        append_folded(out, "CATEGORIES:" + escape_text(*card.classification));
    append_folded(out, "END:VCARD");
    return out;
}

} // namespace gfcx
