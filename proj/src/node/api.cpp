#include "gfcx/node/api.hpp"

#include "gfcx/exchange/frame.hpp"
#include "gfcx/node/lines.hpp"

namespace gfcx::node {

std::string_view api_type_name(std::uint8_t type) noexcept
{
    switch (type) {
    case kProfileList: return "PROFILE_LIST";
    case kProfileCreate: return "PROFILE_CREATE";
    case kProfileUpdate: return "PROFILE_UPDATE";
    case kProfileDelete: return "PROFILE_DELETE";
    case kProfileShow: return "PROFILE_SHOW";
    case kPolicyList: return "POLICY_LIST";
    case kPolicySet: return "POLICY_SET";
    case kCodeRegister: return "CODE_REGISTER";
    case kCodeVerify: return "CODE_VERIFY";
    case kCodeStatus: return "CODE_STATUS";
    case kCodeReauth: return "CODE_REAUTH";
    case kCodeRevoke: return "CODE_REVOKE";
    case kExchange: return "EXCHANGE";
    case kOpStatus: return "OP_STATUS";
    case kPendingList: return "PENDING_LIST";
    case kApprove: return "APPROVE";
    case kRefuse: return "REFUSE";
    case kRoomHost: return "ROOM_HOST";
    case kRoomJoin: return "ROOM_JOIN";
    case kRoomCast: return "ROOM_CAST";
    case kRoomStatus: return "ROOM_STATUS";
    case kContactsList: return "CONTACTS_LIST";
    case kContactsSearch: return "CONTACTS_SEARCH";
    case kClassify: return "CLASSIFY";
    case kExportVcard: return "EXPORT_VCARD";
    case kContactShow: return "CONTACT_SHOW";
    case kApiOk: return "OK";
    case kApiError: return "ERROR";
    }
    return "UNKNOWN";
}

bool is_api_request_type(std::uint8_t type) noexcept
{
    return type >= kProfileList && type <= kContactShow;
}

ApiDoc& ApiDoc::add(std::string_view key, std::string_view value)
{
    lines_.push_back(std::string(key) + "|" + std::string(value));
    return *this;
}

ApiDoc& ApiDoc::add_line(std::string line)
{
    lines_.push_back(std::move(line));
    return *this;
}

std::optional<std::string> ApiDoc::value(std::string_view key) const
{
    for (const auto& l : lines_) {
        if (l.size() > key.size() && l.compare(0, key.size(), key) == 0 && l[key.size()] == '|')
            return l.substr(key.size() + 1);
        if (l == key)
            return std::string();
    }
    return std::nullopt;
}

std::vector<std::string> ApiDoc::values(std::string_view key) const
{
    std::vector<std::string> out;
    for (const auto& l : lines_) {
        if (l.size() > key.size() && l.compare(0, key.size(), key) == 0 && l[key.size()] == '|')
            out.push_back(l.substr(key.size() + 1));
    }
    return out;
}

std::string ApiDoc::text() const
{
    std::string out;
    for (const auto& l : lines_)
        out += l + "\n";
    return out;
}

ApiDoc ApiDoc::parse(std::string_view text)
{
    if (!text.empty() && text.back() != '\n')
        throw Error(Errc::MalformedPayload, "unterminated line in API payload");
    ApiDoc doc;
    for (const auto line : split_lines(text))
        doc.lines_.emplace_back(line);
    return doc;
}

std::string encode_api_request(std::uint8_t type, std::string_view token, const ApiDoc& body)
{
    return exchange::encode_frame(exchange::Frame{type, "TOKEN|" + std::string(token) + "\n" + body.text()});
}

ApiRequest decode_api_request(std::string_view bytes)
{
    auto frame = exchange::decode_frame(bytes);
    if (!is_api_request_type(frame.msg_type))
        throw Error(Errc::UnknownMsgType, "not a local API request type");
    ApiRequest req;
    req.type = frame.msg_type;
    const auto nl = frame.payload.find('\n');
    const std::string_view payload = frame.payload;
    if (nl == std::string::npos || payload.substr(0, 6) != "TOKEN|")
        throw Error(Errc::Unauthorized, "first payload line must be TOKEN|<hex>");
    req.token = std::string(payload.substr(6, nl - 6));
    req.body = ApiDoc::parse(payload.substr(nl + 1));
    return req;
}

std::string ApiReply::error_line() const
{
    return "ERROR|" + std::string(errc_name(error)) + "|" + detail;
}

std::string encode_api_ok(const ApiDoc& doc)
{
    return exchange::encode_frame(exchange::Frame{kApiOk, doc.text()});
}

std::string encode_api_error(Errc code, std::string_view detail)
{
    auto text = sanitize_field(detail);
    if (text.size() > 1024)
        text.resize(1024);
    return exchange::encode_frame(
        exchange::Frame{kApiError, "ERROR|" + std::string(errc_name(code)) + "|" + text + "\n"});
}

ApiReply decode_api_reply(std::string_view bytes)
{
    const auto frame = exchange::decode_frame(bytes);
    ApiReply r;
    if (frame.msg_type == kApiOk) {
        r.ok = true;
        r.doc = ApiDoc::parse(frame.payload);
        return r;
    }
    if (frame.msg_type != kApiError)
        throw Error(Errc::MalformedPayload, "reply is neither OK nor ERROR");
    std::string_view p = frame.payload;
    if (p.substr(0, 6) != "ERROR|" || p.empty() || p.back() != '\n')
        throw Error(Errc::MalformedPayload, "bad ERROR payload");
    p = p.substr(6, p.size() - 7);
    const auto bar = p.find('|');
    if (bar == std::string_view::npos || !errc_from_name(p.substr(0, bar), r.error))
        throw Error(Errc::MalformedPayload, "bad ERROR payload");
    r.detail = std::string(p.substr(bar + 1));
    return r;
}

} // namespace gfcx::node
