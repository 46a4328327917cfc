// Auto-send audit over the simulated network: for random policies and
// requesters, what the responder transmitted must be exactly what the first
// matching rule allows, and nothing is sent for ask/refuse outcomes.

#include <gtest/gtest.h>

#include <random>

#include "gfcx/node/world.hpp"
#include "support/tempdir.hpp"
#include "support/world_helpers.hpp"

namespace gfcx::node {
namespace {

struct OracleRule {
    int kind; // 0 ANY, 1 PREFIX, 2 CODE
    std::string text;
    int profile; // index into profiles
    bool ask;
};

// -1 refuse, otherwise profile index; ask reported separately
std::pair<int, bool> oracle(const std::vector<OracleRule>& rules, const std::string& code, const std::vector<bool>& alive)
{
    for (const auto& r : rules) {
        const bool hit = r.kind == 0 || (!code.empty() && r.kind == 1 && code.rfind(r.text, 0) == 0) ||
                         (!code.empty() && r.kind == 2 && code == r.text);
        if (!hit)
            continue;
        if (!alive[static_cast<std::size_t>(r.profile)])
            return {-1, false};
        return {r.profile, r.ask};
    }
    return {-1, false};
}

const std::vector<std::string> kRequesterCodes = {"Wa10", "Wa22", "Wb33", "Xy44", "", ""};

TEST(PolicyAuditTest, TransmittedProfileMatchesFirstRule)
{
    std::mt19937_64 rng(2024);
    int autos = 0, asks = 0, refusals = 0;
    for (int trial = 0; trial < 25; ++trial) {
        testing::TempDir dir;
        World w(testing::lossless_world(dir.path(), 100 + trial));
        w.add_node("resp");
        for (std::size_t i = 0; i < kRequesterCodes.size(); ++i)
            w.add_node("q" + std::to_string(i));
        std::vector<std::string> ids;
        for (int p = 0; p < 3; ++p)
            ids.push_back(*w.call("resp", kProfileCreate, testing::work_profile_doc("p" + std::to_string(p))).doc.value("ID"));
        ASSERT_EQ(w.register_code("resp", "Rr77", "+15559990000").doc.value("STATUS"), "ACTIVE");
        for (std::size_t i = 0; i < kRequesterCodes.size(); ++i) {
            if (!kRequesterCodes[i].empty())
                w.register_code("q" + std::to_string(i), kRequesterCodes[i], "+1555000" + std::to_string(1000 + i));
        }

        std::vector<OracleRule> rules;
        const int n = 1 + static_cast<int>(rng() % 5);
        const std::vector<std::string> prefixes = {"W", "Wa", "X", "Q"};
        for (int r = 0; r < n; ++r) {
            OracleRule o;
            o.kind = static_cast<int>(rng() % 3);
            if (o.kind == 1)
                o.text = prefixes[rng() % prefixes.size()];
            else if (o.kind == 2)
                o.text = kRequesterCodes[rng() % 4];
            o.profile = static_cast<int>(rng() % 3);
            o.ask = rng() % 4 == 0;
            rules.push_back(o);
        }
        rules.push_back({0, "", static_cast<int>(rng() % 3), rng() % 4 == 0});
        ApiDoc set;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& o = rules[r];
            const std::string m = o.kind == 0 ? "ANY" : (o.kind == 1 ? "PREFIX:" : "CODE:") + o.text;
            set.add_line("R|r" + std::to_string(r) + "|" + m + "|" + ids[static_cast<std::size_t>(o.profile)] + "|" +
                         (o.ask ? "ASK" : "AUTO"));
        }
        ASSERT_TRUE(w.call("resp", kPolicySet, set).ok);
        std::vector<bool> alive{true, true, true};
        if (rng() % 3 == 0) {
            const auto victim = rng() % 3;
            alive[victim] = false;
            ASSERT_TRUE(w.call("resp", kProfileDelete, ApiDoc{}.add("ID", ids[victim])).ok);
        }

        for (std::size_t i = 0; i < kRequesterCodes.size(); ++i) {
            const auto name = "q" + std::to_string(i);
            const auto [want, ask] = oracle(rules, kRequesterCodes[i], alive);
            const auto before = w.node("resp").send_log().size();
            const auto op = w.call(name, kExchange, ApiDoc{}.add("CODE", "Rr77"));
            ASSERT_TRUE(op.ok);
            if (ask) {
                w.run_for(2000);
                const auto lines = w.call("resp", kPendingList).doc.lines();
                ASSERT_FALSE(lines.empty());
                const auto& last = lines.back();
                ASSERT_NE(last.find("|WAITING|"), std::string::npos);
                // alternate approvals and refusals
                const bool approve = rng() % 2 == 0;
                ASSERT_TRUE(w.call("resp", approve ? kApprove : kRefuse, ApiDoc{}.add("ID", last.substr(8, 32))).ok);
                const auto done = w.wait_op(name, op);
                if (approve) {
                    ASSERT_EQ(done.doc.value("STATE"), "DONE") << done.doc.text();
                    // approval sends the rule's profile (no override given)
                    EXPECT_EQ(done.doc.value("NAME"), "p" + std::to_string(want));
                } else {
                    EXPECT_EQ(done.doc.value("STATE"), "FAILED");
                }
                ++asks;
                continue;
            }
            const auto done = w.wait_op(name, op);
            ASSERT_EQ(w.node("resp").send_log().size(), before + 1);
            const auto& rec = w.node("resp").send_log().back();
            EXPECT_EQ(rec.requester_code ? rec.requester_code->text() : "", kRequesterCodes[i]);
            if (want < 0) {
                EXPECT_EQ(done.doc.value("STATE"), "FAILED");
                EXPECT_FALSE(rec.sent_profile);
                ++refusals;
            } else {
                ASSERT_EQ(done.doc.value("STATE"), "DONE") << done.doc.text();
                EXPECT_EQ(done.doc.value("NAME"), "p" + std::to_string(want));
                ASSERT_TRUE(rec.sent_profile);
                EXPECT_EQ(rec.sent_profile->hex(), ids[static_cast<std::size_t>(want)]);
                ++autos;
            }
        }
    }
    // the generator has to reach every branch for the audit to mean anything
    EXPECT_GT(autos, 20);
    EXPECT_GT(asks, 5);
    EXPECT_GT(refusals, 5);
}

} // namespace
} // namespace gfcx::node
