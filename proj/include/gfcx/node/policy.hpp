#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/id.hpp"

namespace gfcx::node {

enum class PolicyMode : std::uint8_t { Auto, AskFirst };

struct Matcher {
    enum class Kind : std::uint8_t { Any, Prefix, Code };
    Kind kind = Kind::Any;
    std::string text; // prefix or exact code; empty for Any

    static Matcher any() { return {}; }
    static Matcher prefix(std::string p) { return {Kind::Prefix, std::move(p)}; }
    static Matcher code(const GcCode& c) { return {Kind::Code, c.text()}; }

    /// Any matches anonymous requests too; Prefix and Code need a requester code.
    bool matches(const std::optional<GcCode>& requester) const;
    /// ANY | PREFIX:<p> | CODE:<c>
    std::string token() const;
    /// Throws Error{Validation} or a code error for CODE:.
    static Matcher parse(std::string_view token);

    friend bool operator==(const Matcher&, const Matcher&) = default;
};

struct PolicyRule {
    std::string rule_id;
    Matcher matcher;
    std::optional<Id128> profile_id; // nullopt until a profile exists
    PolicyMode mode = PolicyMode::Auto;

    friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};

struct Decision {
    enum class Kind : std::uint8_t { Auto, Ask, Refuse };
    Kind kind = Kind::Refuse;
    std::optional<Id128> profile_id;
    std::string rule_id;

    friend bool operator==(const Decision&, const Decision&) = default;
};

std::string_view mode_name(PolicyMode m) noexcept;
std::string_view decision_name(Decision::Kind k) noexcept;

/// First matching rule decides. Refuse when that rule's profile is unset or no
/// longer exists; Refuse also if nothing matches (cannot happen for a valid list).
Decision select_profile_for(const std::vector<PolicyRule>& rules, const std::optional<GcCode>& requester,
                            const std::function<bool(const Id128&)>& profile_exists);

/// Throws Error{Validation}: empty list, no Any rule, bad or duplicate ids,
/// prefix not made of code characters.
void validate_policy(const std::vector<PolicyRule>& rules);

std::vector<PolicyRule> default_policy();

/// Line format: R|<rule_id>|<matcher>|<profile_id or ->|AUTO or ASK
std::string format_rule(const PolicyRule& r);
PolicyRule parse_rule(std::string_view line);
std::string format_policy(const std::vector<PolicyRule>& rules);
/// Throws Error{Validation}.
std::vector<PolicyRule> parse_policy(std::string_view text);

} // namespace gfcx::node
