#include "gfcx/core/gfc_format.hpp"

#include <charconv>
#include <vector>

#include "gfcx/core/error.hpp"

namespace gfcx {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what)
{
    throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + what, line_no);
}

bool parse_timestamp(std::string_view text, Timestamp& out)
{
    if (text.empty() || text.size() > 18)
        return false;
    if (text.size() > 1 && text[0] == '0')
        return false;
    for (char c : text) {
        if (c < '0' || c > '9')
            return false;
    }
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{};
}

} // namespace

std::string serialize_gfc(const Profile& profile)
{
    std::string out;
    out.reserve(64 + profile.name.size() + profile.fields.size() * 32);
    out += "GFC/1\n";
    out += "ID|";
    out += profile.profile_id.hex();
    out += '|';
    out += std::to_string(profile.created_at);
    out += '|';
    out += std::to_string(profile.updated_at);
    out += "\nNAME|";
    out += profile.name;
    out += '\n';
    for (const auto& field : profile.fields) {
        out += "F|";
        out += field.kind.token();
        out += '|';
        out += field.value;
        out += '\n';
    }
    out += "END\n";
    return out;
}

Profile parse_gfc(std::string_view document)
{
    if (document.empty())
        throw Error(Errc::BadMagic, "empty document");

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < document.size()) {
        const auto nl = document.find('\n', start);
        if (nl == std::string_view::npos)
            malformed(lines.size() + 1, "unterminated line");
        lines.push_back(document.substr(start, nl - start));
        start = nl + 1;
    }

    const auto header = lines[0];
    if (header != "GFC/1") {
        if (header.size() > 4 && header.substr(0, 4) == "GFC/")
            throw Error(Errc::UnsupportedVersion, "unsupported version '" + std::string(header.substr(4)) + "'");
        throw Error(Errc::BadMagic, "document does not start with GFC/1");
    }

    Profile profile;
    if (lines.size() < 2)
        malformed(2, "missing ID line");
    {
        const auto parts = split(lines[1], '|');
        if (parts.size() != 4 || parts[0] != "ID")
            malformed(2, "expected ID|<hex>|<created>|<updated>");
        const auto id = Id128::from_hex(parts[1]);
        if (!id)
            malformed(2, "profile id must be 32 lowercase hex characters");
        profile.profile_id = *id;
        if (!parse_timestamp(parts[2], profile.created_at) || !parse_timestamp(parts[3], profile.updated_at))
            malformed(2, "bad timestamp");
    }
    if (lines.size() < 3)
        malformed(3, "missing NAME line");
    {
        const auto line = lines[2];
        if (line.substr(0, 5) != "NAME|")
            malformed(3, "expected NAME|<name>");
        const auto name = line.substr(5);
        if (!is_valid_profile_name(name))
            malformed(3, "invalid profile name");
        profile.name = std::string(name);
    }

    bool ended = false;
    for (std::size_t i = 3; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto line = lines[i];
        if (ended)
            malformed(line_no, "content after END");
        if (line == "END") {
            ended = true;
            continue;
        }
        const auto parts = split(line, '|');
        if (parts.size() != 3 || parts[0] != "F")
            malformed(line_no, "expected F|<KIND>|<value>");
        if (profile.fields.size() == kMaxFieldsPerProfile)
            throw Error(Errc::TooManyFields, "more than 64 fields", line_no);
        FieldKind kind = FieldKind::Tag::Note;
        try {
            kind = FieldKind::from_token(parts[1]);
        } catch (const Error&) {
            malformed(line_no, "invalid field kind");
        }
        if (!is_valid_field_value(parts[2]))
            malformed(line_no, "invalid field value");
        profile.fields.push_back(ProfileField{std::move(kind), std::string(parts[2])});
    }
    if (!ended)
        malformed(lines.size() + 1, "missing END");
    return profile;
}

} // namespace gfcx
