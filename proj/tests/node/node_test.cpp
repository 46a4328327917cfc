#include <gtest/gtest.h>

#include "gfcx/core/gfc_format.hpp"
#include "gfcx/core/error.hpp"
#include "gfcx/exchange/frame.hpp"
#include "gfcx/node/world.hpp"
#include "support/tempdir.hpp"
#include "support/vcard_checker.hpp"
#include "support/world_helpers.hpp"

namespace gfcx::node {
namespace {

using testing::must_ok;
using testing::work_profile_doc;

struct Two {
    Two()
        : world(testing::lossless_world(dir.path()))
    {
        world.add_node("alice");
        world.add_node("bob");
    }
    testing::TempDir dir;
    World world;
};

std::string id_of(const ApiReply& r)
{
    return *r.doc.value("ID");
}

TEST(NodeApiTest, CreatedProfileAppearsInList)
{
    Two t;
    const auto id = id_of(t.world.call("alice", kProfileCreate, work_profile_doc()));
    const auto list = t.world.call("alice", kProfileList);
    ASSERT_TRUE(list.ok);
    ASSERT_EQ(list.doc.lines().size(), 1u);
    EXPECT_EQ(list.doc.lines()[0].substr(0, 8 + 32 + 6), "PROFILE|" + id + "|work|");
    const auto show = t.world.call("alice", kProfileShow, ApiDoc{}.add("NAME", "work"));
    ASSERT_TRUE(show.ok);
    EXPECT_EQ(show.doc.lines().at(1), "NAME|work");
    EXPECT_EQ(show.doc.lines().at(2), "F|MOBILENUMBER|+15550001111");
    // the first profile fills the default rule
    const auto pol = t.world.call("alice", kPolicyList);
    EXPECT_EQ(pol.doc.lines().at(0), "R|default|ANY|" + id + "|AUTO");
}

TEST(NodeApiTest, BadTokenIsUnauthorized)
{
    Two t;
    auto& n = t.world.node("alice");
    const auto r = decode_api_reply(n.local_api(encode_api_request(kProfileList, "deadbeef", {})));
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.error, Errc::Unauthorized);
    const auto raw = decode_api_reply(n.local_api(exchange::encode_frame({kProfileList, "hello\n"})));
    EXPECT_EQ(raw.error, Errc::Unauthorized);
    const auto junk = decode_api_reply(n.local_api("junk"));
    EXPECT_FALSE(junk.ok);
}

TEST(NodeApiTest, ValidationErrorsPropagate)
{
    Two t;
    auto r = t.world.call("alice", kExchange, ApiDoc{}.add("CODE", "A"));
    EXPECT_EQ(r.error, Errc::TooShort);
    EXPECT_EQ(r.error_line().substr(0, 15), "ERROR|TooShort|");
    r = t.world.call("alice", kProfileCreate, ApiDoc{}.add("NAME", "x").add("F", "EMAIL"));
    EXPECT_EQ(r.error, Errc::Validation);
    r = t.world.call("alice", kProfileDelete, ApiDoc{}.add("NAME", "nope"));
    EXPECT_EQ(r.error, Errc::NotFound);
    r = t.world.call("alice", kCodeRegister, ApiDoc{}.add("CODE", "Wa10").add("PHONE", "5550001111"));
    EXPECT_EQ(r.error, Errc::Validation);
    r = t.world.call("alice", kPolicySet, ApiDoc{}.add_line("R|x|PREFIX:W|-|AUTO"));
    EXPECT_EQ(r.error, Errc::Validation);
}

TEST(NodeExchangeTest, RegisterThenExchangeSavesContactQuickly)
{
    Two t;
    must_ok(t.world.call("alice", kProfileCreate, work_profile_doc()));
    const auto reg = t.world.register_code("alice", "Wa10", "+15550001111");
    ASSERT_EQ(reg.doc.value("STATE"), "DONE") << reg.doc.text();
    EXPECT_EQ(reg.doc.value("STATUS"), "ACTIVE");
    const auto status = t.world.call("alice", kCodeStatus);
    EXPECT_EQ(status.doc.value("STATUS"), "ACTIVE");
    EXPECT_EQ(status.doc.value("ACTIVE"), "Wa10|+*********11");

    const auto start = t.world.sim().now_ms();
    const auto op = t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10"));
    const auto done = t.world.wait_op("bob", op);
    ASSERT_EQ(done.doc.value("STATE"), "DONE") << done.doc.text();
    const auto entry = std::stoull(*done.doc.value("ENTRY"));
    const auto e = t.world.node("bob").contacts().get(entry);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->card.source_code.text(), "Wa10");
    EXPECT_EQ(e->card.profile_snapshot.name, "work");
    EXPECT_EQ(e->card.transport, TransportClass::WideArea);
    EXPECT_LT(t.world.sim().now_ms() - start, 2000);
}

TEST(NodeExchangeTest, UnregisteredCodeFailsNotFound)
{
    Two t;
    const auto done = t.world.wait_op("bob", t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "zz99")));
    EXPECT_EQ(done.doc.value("STATE"), "FAILED");
    EXPECT_EQ(done.doc.value("FAIL")->substr(0, 8), "NotFound");
}

TEST(NodeExchangeTest, AskFirstApproveCompletesRequester)
{
    Two t;
    const auto id = id_of(t.world.call("alice", kProfileCreate, work_profile_doc()));
    must_ok(t.world.call("alice", kPolicySet, ApiDoc{}.add_line("R|default|ANY|" + id + "|ASK")));
    t.world.register_code("alice", "Wa10", "+15550001111");
    t.world.register_code("bob", "Bo22", "+15550002222");

    const auto op = t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10"));
    t.world.run_for(3000);
    const auto pending = t.world.call("alice", kPendingList);
    ASSERT_EQ(pending.doc.lines().size(), 1u);
    const auto parts = pending.doc.lines()[0];
    EXPECT_NE(parts.find("|Bo22|"), std::string::npos);
    EXPECT_NE(parts.find("|WAITING|"), std::string::npos);
    // still waiting after well past the retry budget: ACK parked the session
    t.world.run_for(20'000);
    EXPECT_EQ(t.world.call("bob", kOpStatus, ApiDoc{}.add("OP", *op.doc.value("OP"))).doc.value("STATE"), "RUNNING");

    const auto req_id = parts.substr(8, 32);
    const auto ap = t.world.call("alice", kApprove, ApiDoc{}.add("ID", req_id));
    ASSERT_TRUE(ap.ok) << ap.error_line();
    const auto done = t.world.wait_op("bob", op);
    EXPECT_EQ(done.doc.value("STATE"), "DONE");
    EXPECT_EQ(t.world.node("bob").contacts().size(), 1u);
    EXPECT_EQ(t.world.call("alice", kApprove, ApiDoc{}.add("ID", req_id)).error, Errc::Validation);
}

TEST(NodeExchangeTest, RefuseAndApprovalTimeout)
{
    Two t;
    const auto id = id_of(t.world.call("alice", kProfileCreate, work_profile_doc()));
    must_ok(t.world.call("alice", kPolicySet, ApiDoc{}.add_line("R|default|ANY|" + id + "|ASK")));
    t.world.register_code("alice", "Wa10", "+15550001111");

    auto op = t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10"));
    t.world.run_for(2000);
    auto line = t.world.call("alice", kPendingList).doc.lines().at(0);
    ASSERT_TRUE(t.world.call("alice", kRefuse, ApiDoc{}.add("ID", line.substr(8, 32))).ok);
    auto done = t.world.wait_op("bob", op);
    EXPECT_EQ(done.doc.value("FAIL")->substr(0, 7), "Refused");

    op = t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10"));
    const auto t0 = t.world.sim().now_ms();
    done = t.world.wait_op("bob", op);
    EXPECT_EQ(done.doc.value("FAIL")->substr(0, 7), "Refused");
    const auto waited = t.world.sim().now_ms() - t0;
    EXPECT_GE(waited, 120'000);
    EXPECT_LT(waited, 121'000);
    line = t.world.call("alice", kPendingList).doc.lines().at(1);
    EXPECT_NE(line.find("|REFUSED|"), std::string::npos);
}

TEST(NodeExchangeTest, DeletedProfileIsRefused)
{
    Two t;
    const auto id = id_of(t.world.call("alice", kProfileCreate, work_profile_doc()));
    t.world.register_code("alice", "Wa10", "+15550001111");
    must_ok(t.world.call("alice", kProfileDelete, ApiDoc{}.add("ID", id)));
    const auto done = t.world.wait_op("bob", t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10")));
    EXPECT_EQ(done.doc.value("FAIL")->substr(0, 7), "Refused");
}

TEST(NodeExchangeTest, ProximityExchangeUsesAdvertisedCode)
{
    Two t;
    must_ok(t.world.call("alice", kProfileCreate, work_profile_doc()));
    t.world.register_code("alice", "Wa10", "+15550001111");
    const auto done = t.world.wait_op(
        "bob", t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10").add("TRANSPORT", "PROXIMITY")));
    ASSERT_EQ(done.doc.value("STATE"), "DONE") << done.doc.text();
    EXPECT_EQ(t.world.node("bob").contacts().list().at(0).card.transport, TransportClass::Proximity);
    const auto miss = t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Nope").add("TRANSPORT", "PROXIMITY"));
    EXPECT_EQ(miss.error, Errc::NotFound);
}

TEST(NodeExchangeTest, ClassifySearchAndExport)
{
    Two t;
    must_ok(t.world.call("alice", kProfileCreate, work_profile_doc()));
    t.world.register_code("alice", "Wa10", "+15550001111");
    const auto done = t.world.wait_op("bob", t.world.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10")));
    const auto entry = *done.doc.value("ENTRY");
    ASSERT_TRUE(t.world.call("bob", kClassify, ApiDoc{}.add("ENTRY", entry).add("LABEL", "conference")).ok);
    const auto found = t.world.call("bob", kContactsSearch, ApiDoc{}.add("CLASS", "conference"));
    ASSERT_EQ(found.doc.lines().size(), 1u);
    EXPECT_EQ(found.doc.lines()[0].substr(0, 14 + entry.size()), "CONTACT|" + entry + "|Wa10|");
    EXPECT_TRUE(t.world.call("bob", kContactsSearch, ApiDoc{}.add("TEXT", "nobody")).doc.empty());
    EXPECT_EQ(t.world.call("bob", kContactsSearch, ApiDoc{}.add("TEXT", "A@B.CO")).doc.lines().size(), 1u);

    const auto v = t.world.call("bob", kExportVcard, ApiDoc{}.add("ENTRY", entry));
    std::string vcf;
    for (const auto& l : v.doc.values("V"))
        vcf += l + "\r\n";
    const auto check = testing::check_vcard(vcf);
    EXPECT_TRUE(check.ok) << check.error;
    EXPECT_NE(vcf.find("CATEGORIES:conference\r\n"), std::string::npos);

    const auto show = t.world.call("bob", kContactShow, ApiDoc{}.add("ENTRY", entry));
    EXPECT_EQ(show.doc.values("GFC").at(1), "NAME|work");
}

TEST(NodeRegistryTest, WrongOtpThenRevokeFlow)
{
    Two t;
    auto& w = t.world;
    auto r = w.wait_op("alice", w.call("alice", kCodeRegister, ApiDoc{}.add("CODE", "Wa10").add("PHONE", "+15550001111")));
    ASSERT_EQ(r.doc.value("ATTEMPTS"), "3");
    r = w.wait_op("alice", w.call("alice", kCodeVerify, ApiDoc{}.add("OTP", "abcdef")));
    EXPECT_EQ(r.doc.value("FAIL")->substr(0, 10), "InvalidOtp");
    EXPECT_EQ(w.call("alice", kCodeStatus).doc.value("STATUS"), "PENDING");
    r = w.wait_op("alice", w.call("alice", kCodeVerify, ApiDoc{}.add("OTP", *w.inbox().latest("+15550001111"))));
    EXPECT_EQ(r.doc.value("STATUS"), "ACTIVE");

    // bob cannot take it
    r = w.wait_op("bob", w.call("bob", kCodeRegister, ApiDoc{}.add("CODE", "Wa10").add("PHONE", "+15550002222")));
    EXPECT_EQ(r.doc.value("FAIL")->substr(0, 9), "CodeTaken");

    r = w.wait_op("alice", w.call("alice", kCodeReauth));
    ASSERT_EQ(r.doc.value("STATE"), "DONE");
    r = w.wait_op("alice", w.call("alice", kCodeRevoke, ApiDoc{}.add("OTP", *w.inbox().latest("+15550001111"))));
    EXPECT_EQ(r.doc.value("STATUS"), "REVOKED");
    EXPECT_EQ(w.call("alice", kCodeStatus).doc.value("STATUS"), "NONE");
    r = w.register_code("bob", "Wa10", "+15550002222");
    EXPECT_EQ(r.doc.value("STATUS"), "ACTIVE");
}

TEST(NodeRoomTest, HostJoinCastDeliversToEveryMember)
{
    testing::TempDir dir;
    World w(testing::lossless_world(dir.path()));
    w.add_node("host");
    for (int i = 0; i < 5; ++i)
        w.add_node("m" + std::to_string(i));
    must_ok(w.call("host", kProfileCreate, work_profile_doc()));
    w.register_code("host", "Wa10", "+15550001111");
    const auto room = *w.call("host", kRoomHost).doc.value("ROOM");
    for (int i = 0; i < 5; ++i) {
        const auto j = w.wait_op("m" + std::to_string(i), w.call("m" + std::to_string(i), kRoomJoin, ApiDoc{}.add("ROOM", room)));
        ASSERT_EQ(j.doc.value("HOST"), "Wa10") << j.doc.text();
    }
    EXPECT_EQ(w.call("host", kRoomStatus, ApiDoc{}.add("ROOM", room)).doc.value("MEMBERS"), "5");
    const auto cast = w.call("host", kRoomCast, ApiDoc{}.add("ROOM", room));
    EXPECT_EQ(cast.doc.value("SEQ"), "1");
    EXPECT_EQ(cast.doc.value("SENT"), "5");
    w.run_for(1000);
    std::string first;
    for (int i = 0; i < 5; ++i) {
        const auto& c = w.node("m" + std::to_string(i)).contacts();
        ASSERT_EQ(c.size(), 1u);
        const auto e = c.list()[0];
        EXPECT_EQ(e.card.source_code.text(), "Wa10");
        EXPECT_EQ(e.card.transport, TransportClass::Proximity);
        if (first.empty())
            first = e.wire_bytes;
        EXPECT_EQ(e.wire_bytes, first);
    }
    EXPECT_EQ(w.call("m0", kRoomStatus, ApiDoc{}.add("ROOM", room)).doc.value("RECEIVED"), "1");
    EXPECT_EQ(w.call("m0", kRoomJoin, ApiDoc{}.add("ROOM", Id128{}.hex())).error, Errc::UnknownRoom);
}

TEST(NodeRestartTest, StateSurvivesReopen)
{
    testing::TempDir dir;
    std::string id;
    {
        World w(testing::lossless_world(dir.path()));
        w.add_node("alice");
        w.add_node("bob");
        id = id_of(w.call("alice", kProfileCreate, work_profile_doc()));
        w.register_code("alice", "Wa10", "+15550001111");
        w.wait_op("bob", w.call("bob", kExchange, ApiDoc{}.add("CODE", "Wa10")));
        w.call("bob", kClassify, ApiDoc{}.add("ENTRY", "1").add("LABEL", "conference"));
    }
    World w(testing::lossless_world(dir.path()));
    w.add_node("alice");
    w.add_node("bob");
    EXPECT_EQ(w.call("alice", kProfileList).doc.lines().size(), 1u);
    EXPECT_EQ(w.call("alice", kCodeStatus).doc.value("STATUS"), "ACTIVE");
    EXPECT_EQ(w.call("bob", kContactsSearch, ApiDoc{}.add("CLASS", "conference")).doc.lines().size(), 1u);
    // registry log replay: the code is still bound
    EXPECT_NO_THROW(w.registry().resolve(validate_code("Wa10")));
}

} // namespace
} // namespace gfcx::node
