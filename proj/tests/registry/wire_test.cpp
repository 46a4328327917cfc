#include <gtest/gtest.h>

#include <random>

#include "gfcx/core/error.hpp"
#include "gfcx/exchange/bytes.hpp"
#include "gfcx/registry/client.hpp"
#include "gfcx/registry/service.hpp"
#include "gfcx/registry/wire.hpp"
#include "support/generators.hpp"

namespace gfcx::registry {
namespace {

RegMessage random_reg(std::mt19937_64& rng)
{
    const auto txn = static_cast<std::uint32_t>(rng());
    const auto code = testing::random_code(rng);
    Id128 id = Id128::random(rng);
    const netsim::Endpoint ep{netsim::EndpointId{rng()}, static_cast<std::uint8_t>(1 + rng() % 3)};
    switch (rng() % 9) {
    case 0:
        return RegBegin{txn, code, parse_phone("+4930123456"), ep};
    case 1:
        return RegChallenge{txn, id, code, static_cast<Timestamp>(rng() >> 2), static_cast<std::uint8_t>(1 + rng() % 3)};
    case 2:
        return RegComplete{txn, id, std::to_string(rng() % 1000000)};
    case 3:
        return RegOk{txn, code, static_cast<BindingStatus>(1 + rng() % 3), static_cast<Timestamp>(rng() >> 2)};
    case 4:
        return ResolveReq{txn, code};
    case 5:
        return ResolveOk{txn, code, ep, "+*******56"};
    case 6:
        return RegReauth{txn, code};
    case 7:
        return RegRevoke{txn, code, "042042"};
    default:
        return RegError{txn, Errc::CodeTaken, "taken \xc3\xa9"};
    }
}

TEST(RegWireTest, GoldenResolveBytes)
{
    const auto bytes = encode_reg(ResolveReq{7, validate_code("Wa10")});
    const std::string expect("GFCX\x01\x24\x00\x00\x00\x09\x00\x00\x00\x07\x04Wa10", 19);
    EXPECT_EQ(bytes, expect);
}

TEST(RegWireTest, ErrorPayloadIsCodeByteThenDetail)
{
    const auto bytes = encode_reg(RegError{1, Errc::NotFound, "nope"});
    const auto f = exchange::decode_frame(bytes);
    ASSERT_EQ(f.msg_type, kRegError);
    ASSERT_EQ(f.payload.size(), 4u + 1 + 4);
    EXPECT_EQ(static_cast<std::uint8_t>(f.payload[4]), static_cast<std::uint8_t>(Errc::NotFound));
    EXPECT_EQ(f.payload.substr(5), "nope");
}

TEST(RegWireTest, RoundTripRandomMessages)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20000; ++i) {
        const auto m = random_reg(rng);
        const auto bytes = encode_reg(m);
        const auto back = decode_reg(exchange::decode_frame(bytes));
        ASSERT_EQ(encode_reg(back), bytes);
        ASSERT_EQ(back.index(), m.index());
    }
}

TEST(RegWireTest, TruncatedPayloadsAreRejected)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const auto f = exchange::decode_frame(encode_reg(random_reg(rng)));
        // RegError's detail is open-ended, so cutting it still parses
        if (f.msg_type == kRegError)
            continue;
        for (std::size_t n = 0; n < f.payload.size(); ++n) {
            const exchange::Frame cut{f.msg_type, f.payload.substr(0, n)};
            EXPECT_THROW(decode_reg(cut), Error);
        }
        const exchange::Frame longer{f.msg_type, f.payload + "x"};
        EXPECT_THROW(decode_reg(longer), Error);
    }
}

TEST(RegWireTest, UnknownTypeAndBadPhone)
{
    try {
        decode_reg(exchange::Frame{0x2A, std::string(4, '\0')});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnknownMsgType);
    }
    exchange::ByteWriter w;
    w.u32(1);
    w.code(validate_code("Wa10"));
    w.short_string("5550001111");
    w.endpoint(netsim::Endpoint{netsim::EndpointId{1}, 3});
    try {
        decode_reg(exchange::Frame{kRegBegin, w.take()});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MalformedPayload);
    }
}

// Registry on a simulated network with one client endpoint.
struct World {
    explicit World(double loss = 0.0)
        : sim(config(loss))
        , registry(inbox.sink(), RegistryOptions{11, std::nullopt})
        , node(sim, registry, 1'700'000'000)
    {
        me = sim.add_endpoint();
        client = std::make_unique<RegistryClient>(
            exchange::Outbox{[this](netsim::EndpointId to, TransportClass t, std::string b) {
                                 return sim.send(me.id, to, t, std::move(b)).delivered;
                             },
                             [this](std::int64_t at, std::uint64_t tag) { sim.schedule_timer(me.id, at, tag); }},
            node.endpoint().id);
        sim.attach(me.id, &side);
    }

    static netsim::NetConfig config(double loss)
    {
        netsim::NetConfig c;
        c.seed = 5;
        c.wide_area.loss_rate = loss;
        return c;
    }

    struct Side : netsim::Handler {
        explicit Side(World* w) : w(w) {}
        World* w;
        void on_frame(const netsim::Delivery& d) override
        {
            if (auto r = w->client->on_frame(d.from, exchange::decode_frame(d.bytes)))
                w->results.push_back(*r);
        }
        void on_timer(std::uint64_t tag, std::int64_t now) override
        {
            if (auto r = w->client->on_timer(tag, now))
                w->results.push_back(*r);
        }
    } side{this};

    RegistryClient::Result call(RegMessage m)
    {
        results.clear();
        const auto txn = client->call(std::move(m), sim.now_ms());
        sim.advance(sim.now_ms() + 20'000);
        EXPECT_EQ(results.size(), 1u);
        EXPECT_EQ(results.at(0).txn, txn);
        return results.at(0);
    }

    netsim::Simulator sim;
    SmsInbox inbox;
    Registry registry;
    RegistryNode node;
    netsim::Endpoint me;
    std::unique_ptr<RegistryClient> client;
    std::vector<RegistryClient::Result> results;
};

TEST(RegServiceTest, RegisterResolveRevokeOverNetwork)
{
    World w;
    const auto code = validate_code("Wa10");
    const auto phone = parse_phone("+15550001111");
    auto r = w.call(RegBegin{0, code, phone, netsim::Endpoint{netsim::EndpointId{999}, netsim::kReachAll}});
    const auto& ch = std::get<RegChallenge>(*r.reply);
    EXPECT_EQ(ch.attempts_left, 3);
    EXPECT_EQ(ch.expires_at, 1'700'000'000 + 300);

    r = w.call(RegComplete{0, ch.challenge_id, *w.inbox.latest(phone.text())});
    EXPECT_EQ(std::get<RegOk>(*r.reply).status, BindingStatus::Active);

    r = w.call(ResolveReq{0, code});
    const auto& res = std::get<ResolveOk>(*r.reply);
    // the binding points at the sender, not at the id claimed in the payload
    EXPECT_EQ(res.endpoint.id, w.me.id);
    EXPECT_EQ(res.phone_hint, "+*********11");

    r = w.call(RegReauth{0, code});
    EXPECT_EQ(std::get<RegChallenge>(*r.reply).challenge_id, Id128{});
    r = w.call(RegRevoke{0, code, *w.inbox.latest(phone.text())});
    EXPECT_EQ(std::get<RegOk>(*r.reply).status, BindingStatus::Revoked);

    r = w.call(ResolveReq{0, code});
    EXPECT_EQ(std::get<RegError>(*r.reply).error, Errc::NotFound);
}

TEST(RegServiceTest, OtpNeverLeavesTheRegistry)
{
    World w;
    const auto phone = parse_phone("+15550001111");
    std::vector<std::string> otps;
    for (const char* code : {"Wa10", "Wa11", "Wa12"}) {
        auto r = w.call(RegBegin{0, validate_code(code), phone, w.me});
        const auto id = std::get<RegChallenge>(*r.reply).challenge_id;
        otps.push_back(*w.inbox.latest(phone.text()));
        w.call(RegComplete{0, id, "999999" == otps.back() ? "000000" : "999999"});
        w.call(RegComplete{0, id, otps.back()});
        w.call(RegReauth{0, validate_code(code)});
        otps.push_back(*w.inbox.latest(phone.text()));
    }
    ASSERT_EQ(w.inbox.count(), 6u);
    std::size_t from_registry = 0;
    for (const auto& rec : w.sim.trace()) {
        if (rec.from != w.node.endpoint().id)
            continue;
        ++from_registry;
        for (const auto& otp : otps)
            EXPECT_EQ(rec.bytes.find(otp), std::string::npos);
    }
    EXPECT_EQ(from_registry, 12u);
}

TEST(RegServiceTest, RetriedRequestIsAnsweredFromCache)
{
    // Lose the first reply: the client retries and the registry must not run
    // begin_registration twice (which would burn rate-limit budget).
    World w;
    RegistryService svc(w.registry);
    const auto req = encode_reg(RegBegin{42, validate_code("Wa10"), parse_phone("+15550001111"), w.me});
    const auto a = svc.handle(w.me.id, w.me, req, 0);
    const auto b = svc.handle(w.me.id, w.me, req, 1000);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(*a, *b);
    EXPECT_EQ(w.inbox.count(), 1u);
    // past the cache window the request runs again
    const auto c = svc.handle(w.me.id, w.me, req, 61'001);
    EXPECT_NE(*a, *c);
    EXPECT_EQ(w.inbox.count(), 2u);
}

TEST(RegServiceTest, ForeignFramesAreIgnoredAndGarbageGetsError)
{
    World w;
    RegistryService svc(w.registry);
    EXPECT_FALSE(svc.handle(w.me.id, w.me, "hello", 0));
    EXPECT_FALSE(svc.handle(w.me.id, w.me, exchange::encode_frame({0x01, "x"}), 0));
    const auto reply = svc.handle(w.me.id, w.me, exchange::encode_frame({kResolve, std::string("\0\0\0\5\1", 5)}), 0);
    ASSERT_TRUE(reply);
    const auto m = decode_reg(exchange::decode_frame(*reply));
    EXPECT_EQ(txn_of(m), 5u);
    EXPECT_EQ(std::get<RegError>(m).error, Errc::Truncated);
}

TEST(RegServiceTest, ReauthOnlyFromBoundEndpoint)
{
    World w;
    const auto other = w.sim.add_endpoint();
    RegistryService svc(w.registry);
    const auto phone = parse_phone("+15550001111");
    const auto t = w.registry.begin_registration(validate_code("Wa10"), phone, w.me, 0);
    w.registry.complete_registration(t.challenge_id, *w.inbox.latest(phone.text()), 0);
    const auto reply = svc.handle(other.id, other, encode_reg(RegReauth{1, validate_code("Wa10")}), 0);
    EXPECT_EQ(std::get<RegError>(decode_reg(exchange::decode_frame(*reply))).error, Errc::NotFound);
    EXPECT_EQ(w.inbox.count(), 1u);
}

TEST(RegClientTest, TotalLossTimesOutAfterThreeSends)
{
    World w(1.0);
    w.results.clear();
    w.client->call(ResolveReq{0, validate_code("Wa10")}, 0);
    w.sim.advance(60'000);
    ASSERT_EQ(w.results.size(), 1u);
    EXPECT_FALSE(w.results[0].reply);
    EXPECT_EQ(w.results[0].sends, 3);
    EXPECT_EQ(w.client->in_flight(), 0u);
}

TEST(RegClientTest, ModerateLossStillCompletesEveryCall)
{
    World w(0.2);
    int answered = 0;
    for (int i = 0; i < 50; ++i) {
        w.results.clear();
        w.client->call(ResolveReq{0, validate_code("Wa10")}, w.sim.now_ms());
        w.sim.advance(w.sim.now_ms() + 20'000);
        ASSERT_EQ(w.results.size(), 1u);
        answered += w.results[0].reply.has_value();
        if (w.results[0].reply) {
            EXPECT_EQ(std::get<RegError>(*w.results[0].reply).error, Errc::NotFound);
        }
    }
    // per-call failure needs 3 lost round trips: (1 - 0.8^2)^3 ~ 4.7%
    EXPECT_GE(answered, 40);
}

} // namespace
} // namespace gfcx::registry
