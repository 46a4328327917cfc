#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "gfcx/cli/cli.hpp"
#include "gfcx/cli/daemon.hpp"
#include "gfcx/exchange/frame.hpp"
#include "gfcx/node/world.hpp"
#include "support/tempdir.hpp"
#include "support/world_helpers.hpp"

namespace gfcx::cli {
namespace {

using node::ApiDoc;
using node::World;

class WorldTransport : public Transport {
public:
    WorldTransport(World& w, std::string name)
        : world_(w)
        , name_(std::move(name))
    {
    }
    std::string roundtrip(const std::string& frame) override { return world_.node(name_).local_api(frame); }
    void pause(std::int64_t ms) override { world_.run_for(ms); }

private:
    World& world_;
    std::string name_;
};

struct Outcome {
    int code = -1;
    std::string out, err;
};

TransportFactory in_world(World& w)
{
    return [&w](const std::string& address) -> std::unique_ptr<Transport> {
        if (!w.has_node(address))
            throw Error(Errc::Transport, "no node at " + address);
        return std::make_unique<WorldTransport>(w, address);
    };
}

Outcome cli(World& w, const std::string& name, std::vector<std::string> args, Environment env = {})
{
    std::vector<std::string> full = {"--node", name, "--token", (w.node_dir(name) / "token").string()};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    Outcome o;
    o.code = run(full, out, err, in_world(w), env);
    o.out = out.str();
    o.err = err.str();
    return o;
}

Outcome bare(std::vector<std::string> args, Environment env = {})
{
    std::ostringstream out, err;
    Outcome o;
    o.code = run(args, out, err, [](const std::string&) -> std::unique_ptr<Transport> {
        throw Error(Errc::Transport, "unreachable in this test");
    }, env);
    o.out = out.str();
    o.err = err.str();
    return o;
}

struct Pair {
    Pair()
        : world(testing::lossless_world(dir.path()))
    {
        world.add_node("alice");
        world.add_node("bob");
    }
    testing::TempDir dir;
    World world;
};

TEST(CliTest, ExchangeByCodePrintsEntry)
{
    Pair p;
    ASSERT_EQ(cli(p.world, "alice", {"profile", "create", "work", "-f", "EMAIL=a@b.co"}).code, 0);
    ASSERT_EQ(cli(p.world, "alice", {"code", "register", "Wa10", "--phone", "+15550001111"}).code, 0);
    const auto otp = *p.world.inbox().latest("+15550001111");
    const auto v = cli(p.world, "alice", {"--format", "lines", "code", "verify", otp});
    ASSERT_EQ(v.code, 0) << v.err;
    EXPECT_NE(v.out.find("STATUS|ACTIVE\n"), std::string::npos);

    const auto ex = cli(p.world, "bob", {"exchange", "Wa10"});
    ASSERT_EQ(ex.code, 0) << ex.err;
    EXPECT_EQ(ex.out, "saved entry 1 from Wa10 (work)\n");
    EXPECT_TRUE(ex.err.empty());

    const auto bad = cli(p.world, "bob", {"exchange", "A"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(bad.err.rfind("ERROR|TooShort|", 0), 0u) << bad.err;
    EXPECT_EQ(std::count(bad.err.begin(), bad.err.end(), '\n'), 1);

    ASSERT_EQ(cli(p.world, "bob", {"contacts", "classify", "1", "conference"}).code, 0);
    const auto found = cli(p.world, "bob", {"--format", "lines", "contacts", "search", "--class", "conference"});
    ASSERT_EQ(found.code, 0);
    EXPECT_EQ(found.out.rfind("CONTACT|1|Wa10|", 0), 0u);
    EXPECT_NE(found.out.find("|WIDEAREA|conference|work\n"), std::string::npos);

    const auto missing = cli(p.world, "bob", {"exchange", "Zz99"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_EQ(missing.err.rfind("ERROR|NotFound|", 0), 0u);
}

TEST(CliTest, ExportWritesVcard)
{
    Pair p;
    cli(p.world, "alice", {"profile", "create", "work", "-f", "EMAIL=a@b.co"});
    p.world.register_code("alice", "Wa10", "+15550001111");
    ASSERT_EQ(cli(p.world, "bob", {"exchange", "Wa10"}).code, 0);
    const auto plain = cli(p.world, "bob", {"export", "vcard", "1"});
    EXPECT_EQ(plain.out.rfind("BEGIN:VCARD\r\nVERSION:3.0\r\n", 0), 0u);
    const auto path = (p.dir.path() / "out.vcf").string();
    const auto file = cli(p.world, "bob", {"export", "vcard", "1", "-o", path});
    EXPECT_EQ(file.out, "wrote " + path + "\n");
    std::ifstream in(path, std::ios::binary);
    EXPECT_EQ(std::string(std::istreambuf_iterator<char>(in), {}), plain.out);
}

const std::vector<std::vector<std::string>> kLeaves = {
    {"profile", "list"},   {"profile", "create"},  {"profile", "update"},   {"profile", "show"},
    {"profile", "delete"}, {"policy", "list"},     {"policy", "set"},       {"code", "register"},
    {"code", "verify"},    {"code", "status"},     {"code", "reauth"},      {"code", "revoke"},
    {"exchange"},          {"op", "status"},       {"pending", "list"},     {"pending", "approve"},
    {"pending", "refuse"}, {"room", "host"},       {"room", "join"},        {"room", "cast"},
    {"room", "status"},    {"contacts", "list"},   {"contacts", "search"},  {"contacts", "classify"},
    {"contacts", "show"},  {"export", "vcard"},
};

TEST(CliTest, HelpExistsForEverySubcommand)
{
    const auto top = bare({"--help"});
    EXPECT_EQ(top.code, 0);
    for (const auto& leaf : kLeaves) {
        auto args = leaf;
        args.push_back("--help");
        const auto r = bare(args);
        EXPECT_EQ(r.code, 0) << leaf[0];
        std::string usage = "Usage: gfcx";
        for (const auto& s : leaf)
            usage += " " + s;
        EXPECT_NE(r.out.find(usage), std::string::npos) << r.out;
        EXPECT_NE(top.out.find(leaf[0]), std::string::npos);
        // groups have help too
        EXPECT_EQ(bare({leaf[0], "-h"}).code, 0);
    }
}

TEST(CliTest, UnknownFlagsExitOneDeterministically)
{
    for (const auto& leaf : kLeaves) {
        auto args = leaf;
        args.push_back("--definitely-not-a-flag");
        const auto a = bare(args);
        const auto b = bare(args);
        EXPECT_EQ(a.code, 1) << leaf[0];
        EXPECT_EQ(a.err, b.err);
        EXPECT_EQ(a.err.rfind("ERROR|Validation|", 0), 0u) << a.err;
        EXPECT_TRUE(a.out.empty());
    }
    EXPECT_EQ(bare({"nonsense"}).code, 1);
    EXPECT_EQ(bare({"--format", "yaml", "profile", "list"}).code, 1);
}

TEST(CliTest, TokenAndTransportErrors)
{
    Pair p;
    auto r = bare({"profile", "list"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("ERROR|Validation|no token", 0), 0u);
    r = bare({"--token", "/nonexistent/token", "profile", "list"});
    EXPECT_EQ(r.code, 1);
    const auto tok = (p.world.node_dir("alice") / "token").string();
    r = bare({"--token", tok, "profile", "list"});
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("ERROR|Transport|", 0), 0u);

    // env fallbacks
    std::ostringstream out, err;
    Environment env{std::string("alice"), tok};
    EXPECT_EQ(run({"profile", "list"}, out, err, in_world(p.world), env), 0) << err.str();

    // a wrong token is rejected by the node
    const auto wrong = (p.dir.path() / "wrong").string();
    std::ofstream(wrong) << "00ff\n";
    std::ostringstream o2, e2;
    EXPECT_EQ(run({"--node", "alice", "--token", wrong, "profile", "list"}, o2, e2, in_world(p.world), {}), 1);
    EXPECT_EQ(e2.str().rfind("ERROR|Unauthorized|", 0), 0u);

    EXPECT_EQ(exit_code_for(Errc::Timeout), 2);
    EXPECT_EQ(exit_code_for(Errc::Refused), 1);
}

// What the CLI does for one command, done by hand against the API: the
// request it sends, then the same 100 ms OP_STATUS polling.
struct Direct {
    std::string out, err_line;
    int code = 0;
};

Direct direct(World& w, const std::string& name, std::uint8_t type, const ApiDoc& body, bool wait)
{
    auto r = w.call(name, type, body);
    if (r.ok && wait) {
        const auto op = *r.doc.value("OP");
        for (;;) {
            r = w.call(name, node::kOpStatus, ApiDoc{}.add("OP", op));
            if (!r.ok || r.doc.value("STATE") != "RUNNING")
                break;
            w.run_for(100);
        }
        if (const auto fail = r.doc.value("FAIL")) {
            Errc c = Errc::Io;
            errc_from_name(fail->substr(0, fail->find('|')), c);
            return {"", "ERROR|" + *fail + "\n", exit_code_for(c)};
        }
    }
    if (!r.ok)
        return {"", r.error_line() + "\n", exit_code_for(r.error)};
    return {r.doc.text(), "", 0};
}

struct Step {
    std::string node;
    std::vector<std::string> argv;
    std::uint8_t type;
    ApiDoc body;
    bool wait = false;
};

TEST(CliTest, DifferentialAgainstDirectApi)
{
    testing::TempDir da, db;
    World a(testing::lossless_world(da.path(), 7)), b(testing::lossless_world(db.path(), 7));
    for (auto* w : {&a, &b}) {
        w->add_node("alice");
        w->add_node("bob");
    }
    std::mt19937_64 rng(99);
    std::vector<std::string> names;
    std::vector<std::string> ids; // from world b replies
    int checked = 0;
    auto step = [&](const Step& s) {
        auto argv = std::vector<std::string>{"--format", "lines"};
        argv.insert(argv.end(), s.argv.begin(), s.argv.end());
        const auto c = cli(a, s.node, argv);
        const auto d = direct(b, s.node, s.type, s.body, s.wait);
        EXPECT_EQ(c.code, d.code) << s.argv[0];
        EXPECT_EQ(c.out, d.out) << s.argv[0];
        EXPECT_EQ(c.err, d.err_line) << s.argv[0];
        ++checked;
        return d;
    };

    for (int i = 0; i < 120; ++i) {
        const auto who = rng() % 2 ? "alice" : "bob";
        switch (rng() % 12) {
        case 0:
        case 1: {
            const auto name = "p" + std::to_string(rng() % 6);
            const auto email = "u" + std::to_string(rng() % 100) + "@x.co";
            const auto d = step({who, {"profile", "create", name, "-f", "EMAIL=" + email}, node::kProfileCreate,
                                 ApiDoc{}.add("NAME", name).add("F", "EMAIL|" + email)});
            if (d.code == 0)
                ids.push_back(d.out.substr(3, 32));
            break;
        }
        case 2:
            step({who, {"profile", "list"}, node::kProfileList, {}});
            break;
        case 3: {
            const auto name = "p" + std::to_string(rng() % 6);
            step({who, {"profile", "show", name}, node::kProfileShow, ApiDoc{}.add("NAME", name)});
            break;
        }
        case 4:
            if (!ids.empty()) {
                const auto id = ids[rng() % ids.size()];
                step({who, {"profile", "delete", id}, node::kProfileDelete, ApiDoc{}.add("ID", id)});
            }
            break;
        case 5: {
            const std::string code = rng() % 2 ? "Wa10" : "Bo22";
            const std::string phone = code == "Wa10" ? "+15550001111" : "+15550002222";
            const auto d = step({who, {"code", "register", code, "--phone", phone}, node::kCodeRegister,
                                 ApiDoc{}.add("CODE", code).add("PHONE", phone), true});
            if (d.code == 0) {
                const auto otp = *b.inbox().latest(phone);
                EXPECT_EQ(a.inbox().latest(phone), otp);
                step({who, {"code", "verify", otp}, node::kCodeVerify, ApiDoc{}.add("OTP", otp), true});
            }
            break;
        }
        case 6:
            step({who, {"code", "status"}, node::kCodeStatus, {}});
            break;
        case 7: {
            const std::vector<std::string> codes = {"Wa10", "Bo22", "A", "Zz99"};
            const auto code = codes[rng() % codes.size()];
            step({who, {"exchange", code}, node::kExchange, ApiDoc{}.add("CODE", code), true});
            break;
        }
        case 8:
            step({who, {"contacts", "list"}, node::kContactsList, {}});
            break;
        case 9: {
            const auto entry = std::to_string(1 + rng() % 4);
            const auto label = rng() % 2 ? "conference" : "friends";
            step({who, {"contacts", "classify", entry, label}, node::kClassify,
                  ApiDoc{}.add("ENTRY", entry).add("LABEL", label)});
            step({who, {"contacts", "search", "--class", label}, node::kContactsSearch, ApiDoc{}.add("CLASS", label)});
            break;
        }
        case 10: {
            const auto entry = std::to_string(1 + rng() % 3);
            step({who, {"export", "vcard", entry}, node::kExportVcard, ApiDoc{}.add("ENTRY", entry)});
            step({who, {"contacts", "show", entry}, node::kContactShow, ApiDoc{}.add("ENTRY", entry)});
            break;
        }
        default:
            step({who, {"policy", "list"}, node::kPolicyList, {}});
            step({who, {"pending", "list"}, node::kPendingList, {}});
            break;
        }
    }
    EXPECT_GT(checked, 120);
    // the sequence must have reached the interesting states
    EXPECT_GT(a.node("alice").contacts().size() + a.node("bob").contacts().size(), 0u);
}

TEST(DaemonTest, CliOverTcpAndHttpBridge)
{
    testing::TempDir dir;
    DaemonOptions o;
    o.world = testing::lossless_world(dir.path(), 3);
    o.nodes = {"alice", "bob"};
    o.base_port = 0;
    o.http_port = 0;
    Daemon d(o);
    d.start();
    auto run_tcp = [&](const std::string& name, std::vector<std::string> args) {
        std::vector<std::string> full = {"--node", "127.0.0.1:" + std::to_string(d.port_of(name)), "--token",
                                         d.token_path(name).string(), "--format", "lines"};
        full.insert(full.end(), args.begin(), args.end());
        std::ostringstream out, err;
        const int code = run(full, out, err, tcp_transport, {});
        return Outcome{code, out.str(), err.str()};
    };
    ASSERT_EQ(run_tcp("alice", {"profile", "create", "work", "-f", "EMAIL=a@b.co"}).code, 0);
    ASSERT_EQ(run_tcp("alice", {"code", "register", "Wa10", "--phone", "+15550001111"}).code, 0);
    const auto otp = d.with_world([](World& w) { return *w.inbox().latest("+15550001111"); });
    ASSERT_EQ(run_tcp("alice", {"code", "verify", otp}).code, 0);
    const auto ex = run_tcp("bob", {"exchange", "Wa10"});
    ASSERT_EQ(ex.code, 0) << ex.err;
    EXPECT_NE(ex.out.find("ENTRY|1\n"), std::string::npos);

    httplib::Client http("127.0.0.1", *d.http_port());
    const auto token = d.with_world([](World& w) { return w.node("bob").token(); });
    const auto res = http.Post("/api/bob", node::encode_api_request(node::kContactsList, token, {}),
                               "application/octet-stream");
    ASSERT_TRUE(res);
    const auto reply = node::decode_api_reply(res->body);
    ASSERT_TRUE(reply.ok);
    EXPECT_EQ(reply.doc.lines().size(), 1u);
    const auto nodes = http.Get("/api/nodes");
    ASSERT_TRUE(nodes);
    EXPECT_EQ(nodes->body, "NODE|alice\nNODE|bob\n");
    const auto none = node::decode_api_reply(http.Post("/api/carol", "x", "application/octet-stream")->body);
    EXPECT_EQ(none.error, Errc::NotFound);
    d.stop();
}

} // namespace
} // namespace gfcx::cli
