#include "gfcx/node/policy.hpp"

#include <set>

#include "gfcx/core/error.hpp"
#include "gfcx/node/lines.hpp"

namespace gfcx::node {

bool Matcher::matches(const std::optional<GcCode>& requester) const
{
    switch (kind) {
    case Kind::Any:
        return true;
    case Kind::Prefix:
        return requester && requester->text().compare(0, text.size(), text) == 0;
    case Kind::Code:
        return requester && requester->text() == text;
    }
    return false;
}

std::string Matcher::token() const
{
    switch (kind) {
    case Kind::Any:
        return "ANY";
    case Kind::Prefix:
        return "PREFIX:" + text;
    case Kind::Code:
        return "CODE:" + text;
    }
    return "ANY";
}

Matcher Matcher::parse(std::string_view token)
{
    if (token == "ANY")
        return any();
    if (token.substr(0, 7) == "PREFIX:") {
        const auto p = token.substr(7);
        if (p.empty() || p.size() > kMaxCodeLength)
            throw Error(Errc::Validation, "prefix must be 1-6 code characters");
        for (char c : p) {
            if (!is_code_byte(static_cast<unsigned char>(c)))
                throw Error(Errc::Validation, "prefix must be 1-6 code characters");
        }
        return prefix(std::string(p));
    }
    if (token.substr(0, 5) == "CODE:")
        return code(validate_code(token.substr(5)));
    throw Error(Errc::Validation, "matcher must be ANY, PREFIX:<p> or CODE:<code>");
}

std::string_view mode_name(PolicyMode m) noexcept
{
    return m == PolicyMode::Auto ? "AUTO" : "ASK";
}

std::string_view decision_name(Decision::Kind k) noexcept
{
    switch (k) {
    case Decision::Kind::Auto:
        return "AUTO";
    case Decision::Kind::Ask:
        return "ASK";
    case Decision::Kind::Refuse:
        return "REFUSE";
    }
    return "REFUSE";
}

Decision select_profile_for(const std::vector<PolicyRule>& rules, const std::optional<GcCode>& requester,
                            const std::function<bool(const Id128&)>& profile_exists)
{
    for (const auto& r : rules) {
        if (!r.matcher.matches(requester))
            continue;
        if (!r.profile_id || !profile_exists(*r.profile_id))
            return Decision{Decision::Kind::Refuse, r.profile_id, r.rule_id};
        return Decision{r.mode == PolicyMode::Auto ? Decision::Kind::Auto : Decision::Kind::Ask, r.profile_id,
                        r.rule_id};
    }
    return Decision{};
}

namespace {

bool valid_rule_id(std::string_view id)
{
    if (id.empty() || id.size() > 32)
        return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok)
            return false;
    }
    return true;
}

} // namespace

void validate_policy(const std::vector<PolicyRule>& rules)
{
    if (rules.empty())
        throw Error(Errc::Validation, "policy has no rules");
    if (rules.size() > 256)
        throw Error(Errc::Validation, "policy has more than 256 rules");
    std::set<std::string> ids;
    bool has_any = false;
    for (const auto& r : rules) {
        if (!valid_rule_id(r.rule_id))
            throw Error(Errc::Validation, "rule id must be 1-32 of [A-Za-z0-9_-]");
        if (!ids.insert(r.rule_id).second)
            throw Error(Errc::Validation, "duplicate rule id " + r.rule_id);
        has_any = has_any || r.matcher.kind == Matcher::Kind::Any;
    }
    if (!has_any)
        throw Error(Errc::Validation, "policy needs an ANY rule");
}

std::vector<PolicyRule> default_policy()
{
    return {PolicyRule{"default", Matcher::any(), std::nullopt, PolicyMode::Auto}};
}

std::string format_rule(const PolicyRule& r)
{
    return "R|" + r.rule_id + "|" + r.matcher.token() + "|" + (r.profile_id ? r.profile_id->hex() : "-") + "|" +
           std::string(mode_name(r.mode));
}

PolicyRule parse_rule(std::string_view line)
{
    const auto parts = split_bar(line);
    if (parts.size() != 5 || parts[0] != "R")
        throw Error(Errc::Validation, "rule must be R|<id>|<matcher>|<profile>|AUTO|ASK");
    PolicyRule r;
    r.rule_id = std::string(parts[1]);
    r.matcher = Matcher::parse(parts[2]);
    if (parts[3] != "-") {
        r.profile_id = Id128::from_hex(parts[3]);
        if (!r.profile_id)
            throw Error(Errc::Validation, "bad profile id in rule " + r.rule_id);
    }
    if (parts[4] == "AUTO")
        r.mode = PolicyMode::Auto;
    else if (parts[4] == "ASK")
        r.mode = PolicyMode::AskFirst;
    else
        throw Error(Errc::Validation, "mode must be AUTO or ASK");
    return r;
}

std::string format_policy(const std::vector<PolicyRule>& rules)
{
    std::string out;
    for (const auto& r : rules)
        out += format_rule(r) + "\n";
    return out;
}

std::vector<PolicyRule> parse_policy(std::string_view text)
{
    std::vector<PolicyRule> rules;
    for (const auto line : split_lines(text)) {
        if (line.empty() || line[0] == '#')
            continue;
        rules.push_back(parse_rule(line));
    }
    return rules;
}

} // namespace gfcx::node
