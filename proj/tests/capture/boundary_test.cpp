#include "generators.hpp"

#include "sharelm/capture/replay.hpp"

#include <gtest/gtest.h>

using namespace sharelm;
using namespace sharelm::capture;

namespace {

const Timestamp T0 = from_unix_seconds(1704067200);
const std::string kUrl = "https://huggingface.co/chat/conversation/abc";

CapturedConversation active_with(std::vector<std::pair<Role, std::string>> turns) {
    CapturedConversation c;
    c.url = kUrl;
    for (auto& [role, text] : turns) c.messages.push_back({c.messages.size(), role, std::move(text), std::nullopt});
    return c;
}

Snapshot snap(std::vector<std::pair<Role, std::string>> turns, const std::string& url = kUrl) {
    Snapshot s;
    s.url = url;
    for (auto& [role, text] : turns) s.turns.push_back({role, std::move(text), std::nullopt});
    return s;
}

using Page = std::vector<std::pair<std::string, std::string>>;  // (role, text)

Page page_of(const nlohmann::json& step) {
    Page page;
    for (const auto& t : step["turns"]) page.emplace_back(t["role"], t["text"]);
    return page;
}

bool strict_prefix(const Page& a, const Page& b) {
    return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Boundary observed(const nlohmann::ordered_json& line) {
    bool appended = false;
    for (const auto& e : line["events"]) {
        if (e["event"] == "opened") return Boundary::new_conversation;
        if (e["event"] == "appended") appended = true;
    }
    return appended ? Boundary::continuation : Boundary::no_change;
}

}  // namespace

TEST(DetectBoundary, StrictPrefixExtensionContinues) {
    auto active = active_with({{Role::user, "hi"}, {Role::model, "hello"}});
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "hi"}, {Role::model, "hello"}, {Role::user, "thanks"}})),
              Boundary::continuation);
}

TEST(DetectBoundary, NoActiveIsNew) {
    EXPECT_EQ(detect_boundary(nullptr, snap({{Role::user, "hi"}})), Boundary::new_conversation);
}

TEST(DetectBoundary, DifferentTranscriptIsNew) {
    auto active = active_with({{Role::user, "hi"}, {Role::model, "hello"}});
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "bye"}})), Boundary::new_conversation);
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "hi"}})), Boundary::new_conversation);
    EXPECT_EQ(detect_boundary(&active, snap({{Role::model, "hi"}, {Role::model, "hello"}})),
              Boundary::new_conversation);
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "hi"}, {Role::model, "hello"}, {Role::user, "x"}}, kUrl + "2")),
              Boundary::new_conversation);
}

TEST(DetectBoundary, IdenticalIsNoChange) {
    auto active = active_with({{Role::user, "hi"}, {Role::model, "hello"}});
    auto s = snap({{Role::user, "hi"}, {Role::model, "hello"}});
    s.turns[1].response_rating = Rating::thumbs_down;
    EXPECT_EQ(detect_boundary(&active, s), Boundary::no_change);
}

TEST(DetectBoundary, PagePrefixIsComparedByDigest) {
    auto active = active_with({{Role::model, "b"}});
    active.page_prefix = {digest_turn(Role::user, "a", 5)};
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "a"}, {Role::model, "b"}}), 5), Boundary::no_change);
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "z"}, {Role::model, "b"}}), 5), Boundary::new_conversation);
    EXPECT_EQ(detect_boundary(&active, snap({{Role::user, "a"}, {Role::model, "b"}}), 6), Boundary::new_conversation);
}

// Rebuild oracle: the final snapshot alone determines what a grow-only
// session should have captured.
TEST(ReplayOracle, GrowOnlyMatchesFinalSnapshot) {
    sharelm::testing::Rng rng(101);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<Role, std::string>> final_turns;
        auto session = sharelm::testing::make_grow_only_session(rng, final_turns);
        SessionReplayer replayer(session.clock);
        std::vector<std::string> opened;
        for (const auto& step : session.steps) {
            auto line = replayer.apply(step);
            for (const auto& e : line.value("events", nlohmann::ordered_json::array())) {
                if (e["event"] == "opened") opened.push_back(e["conversation_id"]);
            }
        }
        ASSERT_EQ(opened.size(), 1u);
        const auto& last = session.steps.back();
        const auto* c = replayer.store().find(opened[0]);
        ASSERT_NE(c, nullptr);
        ASSERT_EQ(c->messages.size(), last["turns"].size());
        for (std::size_t k = 0; k < c->messages.size(); ++k) {
            const auto& turn = last["turns"][k];
            EXPECT_EQ(c->messages[k].index, k);
            EXPECT_EQ(to_string(c->messages[k].role), turn["role"].get<std::string>());
            EXPECT_EQ(c->messages[k].text, turn["text"].get<std::string>());
            std::optional<Rating> rating;
            if (turn.contains("response_rating")) rating = parse_rating(turn["response_rating"].get<std::string>());
            EXPECT_EQ(c->messages[k].response_rating, rating);
        }
        ASSERT_EQ(final_turns.size(), c->messages.size());
    }
}

TEST(ReplayOracle, EditResetClassificationAgrees) {
    sharelm::testing::Rng rng(202);
    for (int i = 0; i < 200; ++i) {
        auto session = sharelm::testing::make_edit_reset_session(rng);
        SessionReplayer replayer(session.clock);
        std::optional<std::pair<std::string, Page>> active;  // oracle's view of the active page
        std::map<std::string, Page> last_page;               // per url
        for (const auto& step : session.steps) {
            auto line = replayer.apply(step);
            if (step["op"] != "snapshot") continue;
            const std::string url = step["url"];
            const Page page = page_of(step);
            Boundary expected;
            if (!active || active->first != url) {
                expected = Boundary::new_conversation;
            } else if (active->second == page) {
                expected = Boundary::no_change;
            } else if (strict_prefix(active->second, page)) {
                expected = Boundary::continuation;
            } else {
                expected = Boundary::new_conversation;
            }
            ASSERT_EQ(observed(line), expected) << line.dump();

            if (expected == Boundary::new_conversation) {
                // Only turns past the part of the page seen before are new.
                const Page& before = last_page[url];
                std::size_t skip = 0;
                while (skip < before.size() && skip < page.size() && before[skip] == page[skip]) ++skip;
                const auto* c = replayer.store().active();
                ASSERT_NE(c, nullptr);
                ASSERT_EQ(c->messages.size(), page.size() - skip);
                for (std::size_t k = 0; k < c->messages.size(); ++k) {
                    ASSERT_EQ(c->messages[k].text, page[skip + k].second);
                }
            }
            active = std::make_pair(url, page);
            last_page[url] = page;
        }
    }
}

TEST(ReplayOracle, NoTurnCapturedTwice) {
    sharelm::testing::Rng rng(303);
    for (int i = 0; i < 200; ++i) {
        auto session = sharelm::testing::make_edit_reset_session(rng);
        SessionReplayer replayer(session.clock);
        for (const auto& step : session.steps) replayer.apply(step);
        std::set<std::string> seen;
        for (const auto& [id, c] : replayer.store().conversations()) {
            for (const auto& m : c.messages) ASSERT_TRUE(seen.insert(m.text).second) << m.text;
        }
    }
}
