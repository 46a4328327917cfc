#include "gfcx/cli/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gfcx/node/api.hpp"
#include "gfcx/node/lines.hpp"

namespace gfcx::cli {

using node::ApiDoc;
using node::ApiReply;

Environment Environment::from_process()
{
    Environment e;
    if (const char* v = std::getenv("GFCX_NODE"); v && *v)
        e.node = v;
    if (const char* v = std::getenv("GFCX_TOKEN"); v && *v)
        e.token = v;
    return e;
}

int exit_code_for(Errc code) noexcept
{
    switch (code) {
    case Errc::Transport:
    case Errc::Timeout:
    case Errc::Io:
    case Errc::UnknownEndpoint:
    case Errc::NotInRange:
        return 2;
    default:
        return 1;
    }
}

namespace {

using Plain = std::function<void(const ApiDoc&, std::ostream&)>;

struct Plan {
    std::uint8_t type = 0;
    ApiDoc body;
    bool wait = false; // reply carries OP; poll it to completion
    Plain plain;
};

struct Leaf {
    CLI::App* app;
    std::function<Plan()> plan;
};

// KEY|a|b  ->  key  a  b
void generic_plain(const ApiDoc& doc, std::ostream& out)
{
    for (const auto& line : doc.lines()) {
        const auto parts = node::split_bar(line);
        std::string key(parts[0]);
        for (auto& c : key)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out << key;
        for (std::size_t i = 1; i < parts.size(); ++i)
            out << (i == 1 ? ": " : "  ") << parts[i];
        out << "\n";
    }
}

std::string read_token(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Validation, "cannot read token file " + path);
    std::string token;
    std::getline(in, token);
    while (!token.empty() && (token.back() == '\r' || token.back() == ' '))
        token.pop_back();
    if (token.empty())
        throw Error(Errc::Validation, "token file " + path + " is empty");
    return token;
}

bool looks_like_id(const std::string& s)
{
    if (s.size() != 32)
        return false;
    for (char c : s)
        if (!std::isxdigit(static_cast<unsigned char>(c)) || (c >= 'A' && c <= 'F'))
            return false;
    return true;
}

void add_ref(ApiDoc& d, const std::string& ref)
{
    d.add(looks_like_id(ref) ? "ID" : "NAME", ref);
}

// KIND=value -> F|KIND|value
void add_fields(ApiDoc& d, const std::vector<std::string>& fields)
{
    for (const auto& f : fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(Errc::Validation, "field '" + f + "' is not KIND=value");
        d.add("F", f.substr(0, eq) + "|" + f.substr(eq + 1));
    }
}

void error_line(std::ostream& err, Errc code, std::string_view detail)
{
    err << "ERROR|" << errc_name(code) << "|" << node::sanitize_field(detail) << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const TransportFactory& connect,
        const Environment& env)
{
    CLI::App app{"Exchange contact cards by code through a local gfcx node.", "gfcx"};
    app.require_subcommand(1);
    std::string node_addr, token_path, format = "plain";
    std::int64_t wait_ms = 180'000;
    app.add_option("--node", node_addr, "node address host:port (env GFCX_NODE)");
    app.add_option("--token", token_path, "path of the node token file (env GFCX_TOKEN)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"plain", "lines"}));
    app.add_option("--wait-ms", wait_ms, "give up on a running operation after this long")->check(CLI::PositiveNumber);

    std::vector<Leaf> leaves;
    auto group = [&](const char* name, const char* help) {
        auto* g = app.add_subcommand(name, help);
        g->require_subcommand(1);
        g->fallthrough();
        return g;
    };
    auto leaf = [&](CLI::App* parent, const char* name, const char* help, std::function<Plan()> plan) {
        auto* a = parent->add_subcommand(name, help);
        a->fallthrough();
        leaves.push_back({a, std::move(plan)});
        return a;
    };

    // Option targets live here so the plan lambdas can read them after parse.
    std::string s1, s2, s3;
    std::vector<std::string> fields, rules;
    std::string q_text, q_class, q_code, q_from, q_to, output;
    bool proximity = false, no_wait = false;

    auto* profile = group("profile", "manage the profiles you hand out");
    leaf(profile, "list", "list profiles", [] { return Plan{node::kProfileList, {}, false, {}}; });
    auto* pc = leaf(profile, "create", "create a profile", [&] {
        Plan p{node::kProfileCreate, {}, false, {}};
        p.body.add("NAME", s1);
        add_fields(p.body, fields);
        return p;
    });
    pc->add_option("name", s1, "profile name")->required();
    pc->add_option("-f,--field", fields, "KIND=value, repeatable");
    auto* pu = leaf(profile, "update", "replace a profile's name and fields", [&] {
        Plan p{node::kProfileUpdate, {}, false, {}};
        p.body.add("ID", s1).add("NAME", s2);
        add_fields(p.body, fields);
        return p;
    });
    pu->add_option("id", s1, "profile id")->required();
    pu->add_option("name", s2, "new name")->required();
    pu->add_option("-f,--field", fields, "KIND=value, repeatable");
    auto* ps = leaf(profile, "show", "print one profile", [&] {
        Plan p{node::kProfileShow, {}, false, {}};
        add_ref(p.body, s1);
        return p;
    });
    ps->add_option("profile", s1, "id or name")->required();
    auto* pd = leaf(profile, "delete", "delete a profile", [&] {
        Plan p{node::kProfileDelete, {}, false, {}};
        add_ref(p.body, s1);
        return p;
    });
    pd->add_option("profile", s1, "id or name")->required();

    auto* policy = group("policy", "auto-send rules, first match wins");
    leaf(policy, "list", "print the rule list", [] { return Plan{node::kPolicyList, {}, false, {}}; });
    auto* pset = leaf(policy, "set", "replace the rule list", [&] {
        Plan p{node::kPolicySet, {}, false, {}};
        for (const auto& r : rules)
            p.body.add_line(r);
        return p;
    });
    pset->add_option("rules", rules, "R|id|ANY or PREFIX:p or CODE:c|profile id or -|AUTO or ASK")->required();

    auto* code = group("code", "your GC code at the registry");
    auto* cr = leaf(code, "register", "claim a code; an OTP is sent to the phone", [&] {
        Plan p{node::kCodeRegister, {}, true, {}};
        p.body.add("CODE", s1).add("PHONE", s2);
        return p;
    });
    cr->add_option("code", s1, "2 to 6 characters")->required();
    cr->add_option("--phone", s2, "E.164 phone number, e.g. +15550001111")->required();
    auto* cv = leaf(code, "verify", "complete registration with the OTP", [&] {
        Plan p{node::kCodeVerify, {}, true, {}};
        p.body.add("OTP", s1);
        return p;
    });
    cv->add_option("otp", s1, "6-digit code from the SMS")->required();
    leaf(code, "status", "show active and pending codes", [] { return Plan{node::kCodeStatus, {}, false, {}}; });
    leaf(code, "reauth", "request an OTP to revoke the active code",
         [] { return Plan{node::kCodeReauth, {}, true, {}}; });
    auto* crv = leaf(code, "revoke", "release the active code", [&] {
        Plan p{node::kCodeRevoke, {}, true, {}};
        p.body.add("OTP", s1);
        return p;
    });
    crv->add_option("otp", s1, "OTP from code reauth")->required();

    auto* ex = leaf(&app, "exchange", "ask the owner of a code for their card", [&] {
        Plan p{node::kExchange, {}, !no_wait, {}};
        p.body.add("CODE", s1);
        if (proximity)
            p.body.add("TRANSPORT", "PROXIMITY");
        p.plain = [](const ApiDoc& d, std::ostream& o) {
            if (const auto e = d.value("ENTRY"))
                o << "saved entry " << *e << " from " << d.value("CODE").value_or("?") << " ("
                  << d.value("NAME").value_or("") << ")\n";
            else
                generic_plain(d, o);
        };
        return p;
    });
    ex->add_option("code", s1, "the other person's GC code")->required();
    ex->add_flag("--proximity", proximity, "use the nearby link instead of the registry");
    ex->add_flag("--no-wait", no_wait, "print the operation id and return");

    auto* op = group("op", "long-running operations");
    auto* ost = leaf(op, "status", "poll an operation", [&] {
        Plan p{node::kOpStatus, {}, false, {}};
        p.body.add("OP", s1);
        return p;
    });
    ost->add_option("op", s1, "operation id")->required();

    auto* pending = group("pending", "requests waiting for your approval");
    leaf(pending, "list", "list approvals", [] { return Plan{node::kPendingList, {}, false, {}}; });
    auto* pa = leaf(pending, "approve", "send a card to a waiting requester", [&] {
        Plan p{node::kApprove, {}, false, {}};
        p.body.add("ID", s1);
        if (!s2.empty())
            p.body.add("PROFILE", s2);
        return p;
    });
    pa->add_option("id", s1, "request id")->required();
    pa->add_option("--profile", s2, "send this profile instead of the rule's");
    auto* pr = leaf(pending, "refuse", "refuse a waiting requester", [&] {
        Plan p{node::kRefuse, {}, false, {}};
        p.body.add("ID", s1);
        return p;
    });
    pr->add_option("id", s1, "request id")->required();

    auto* room = group("room", "one-to-many broadcast to nearby members");
    auto* rh = leaf(room, "host", "open a room", [&] {
        Plan p{node::kRoomHost, {}, false, {}};
        if (!s1.empty())
            p.body.add("PROFILE", s1);
        return p;
    });
    rh->add_option("--profile", s1, "profile to broadcast");
    auto* rj = leaf(room, "join", "join a room", [&] {
        Plan p{node::kRoomJoin, {}, !no_wait, {}};
        p.body.add("ROOM", s1);
        return p;
    });
    rj->add_option("room", s1, "room id")->required();
    rj->add_flag("--no-wait", no_wait, "print the operation id and return");
    auto* rc = leaf(room, "cast", "broadcast the room card to members", [&] {
        Plan p{node::kRoomCast, {}, false, {}};
        p.body.add("ROOM", s1);
        return p;
    });
    rc->add_option("room", s1, "room id")->required();
    auto* rs = leaf(room, "status", "show room membership", [&] {
        Plan p{node::kRoomStatus, {}, false, {}};
        p.body.add("ROOM", s1);
        return p;
    });
    rs->add_option("room", s1, "room id")->required();

    auto* contacts = group("contacts", "cards you received");
    leaf(contacts, "list", "list all contacts, newest first", [] { return Plan{node::kContactsList, {}, false, {}}; });
    auto* cs = leaf(contacts, "search", "filter contacts (all given filters must match)", [&] {
        Plan p{node::kContactsSearch, {}, false, {}};
        if (!q_text.empty())
            p.body.add("TEXT", q_text);
        if (!q_class.empty())
            p.body.add("CLASS", q_class);
        if (!q_code.empty())
            p.body.add("CODE", q_code);
        if (!q_from.empty())
            p.body.add("FROM", q_from);
        if (!q_to.empty())
            p.body.add("TO", q_to);
        return p;
    });
    cs->add_option("--text", q_text, "case-insensitive match on name or any field");
    cs->add_option("--class", q_class, "classification label");
    cs->add_option("--code", q_code, "sender's code");
    cs->add_option("--from", q_from, "received at or after (ms)");
    cs->add_option("--to", q_to, "received at or before (ms)");
    auto* cc = leaf(contacts, "classify", "label a contact", [&] {
        Plan p{node::kClassify, {}, false, {}};
        p.body.add("ENTRY", s1).add("LABEL", s2);
        return p;
    });
    cc->add_option("entry", s1, "entry id")->required();
    cc->add_option("label", s2, "e.g. conference")->required();
    auto* csh = leaf(contacts, "show", "print one contact", [&] {
        Plan p{node::kContactShow, {}, false, {}};
        p.body.add("ENTRY", s1);
        return p;
    });
    csh->add_option("entry", s1, "entry id")->required();

    auto* exp = group("export", "write contacts in other formats");
    auto* ev = leaf(exp, "vcard", "export one contact as vCard 3.0", [&] {
        Plan p{node::kExportVcard, {}, false, {}};
        p.body.add("ENTRY", s1);
        const auto path = output;
        p.plain = [path](const ApiDoc& d, std::ostream& o) {
            std::string vcf;
            for (const auto& l : d.values("V"))
                vcf += l + "\r\n";
            if (path.empty()) {
                o << vcf;
                return;
            }
            std::ofstream f(path, std::ios::binary);
            if (!(f << vcf) || !f.flush())
                throw Error(Errc::Io, "cannot write " + path);
            o << "wrote " << path << "\n";
        };
        return p;
    });
    ev->add_option("entry", s1, "entry id")->required();
    ev->add_option("-o,--output", output, "write to this file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        std::ostringstream ignored;
        app.exit(e, out, ignored);
        return 0;
    } catch (const CLI::ParseError& e) {
        error_line(err, Errc::Validation, e.what());
        return 1;
    }

    try {
        const Leaf* chosen = nullptr;
        for (const auto& l : leaves)
            if (l.app->parsed())
                chosen = &l;
        if (!chosen)
            throw Error(Errc::Validation, "no command given");
        const Plan plan = chosen->plan();

        if (token_path.empty() && env.token)
            token_path = *env.token;
        if (token_path.empty())
            throw Error(Errc::Validation, "no token: pass --token or set GFCX_TOKEN");
        const auto token = read_token(token_path);
        if (node_addr.empty())
            node_addr = env.node.value_or(kDefaultNode);
        auto transport = connect(node_addr);

        auto call = [&](std::uint8_t type, const ApiDoc& body) {
            return node::decode_api_reply(transport->roundtrip(node::encode_api_request(type, token, body)));
        };
        ApiReply reply = call(plan.type, plan.body);
        if (reply.ok && plan.wait) {
            const auto op_id = reply.doc.value("OP");
            if (!op_id)
                throw Error(Errc::MalformedPayload, "reply carries no OP");
            std::int64_t waited = 0;
            for (;;) {
                reply = call(node::kOpStatus, ApiDoc{}.add("OP", *op_id));
                if (!reply.ok || reply.doc.value("STATE") != "RUNNING")
                    break;
                if (waited >= wait_ms)
                    throw Error(Errc::Timeout, "operation " + *op_id + " still running after " +
                                                   std::to_string(wait_ms) + " ms");
                transport->pause(100);
                waited += 100;
            }
            if (reply.ok) {
                if (const auto fail = reply.doc.value("FAIL")) {
                    const auto bar = fail->find('|');
                    Errc code = Errc::Io;
                    if (!errc_from_name(std::string_view(*fail).substr(0, bar), code))
                        code = Errc::Io;
                    error_line(err, code, bar == std::string::npos ? "" : fail->substr(bar + 1));
                    return exit_code_for(code);
                }
            }
        }
        if (!reply.ok) {
            err << reply.error_line() << "\n";
            return exit_code_for(reply.error);
        }
        if (format == "lines")
            out << reply.doc.text();
        else if (plan.plain)
            plan.plain(reply.doc, out);
        else
            generic_plain(reply.doc, out);
        return 0;
    } catch (const Error& e) {
        error_line(err, e.code(), e.detail());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        error_line(err, Errc::Io, e.what());
        return 2;
    }
}

} // namespace gfcx::cli
