#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"
#include "sharelm/unifier/adapter.hpp"

#include <gtest/gtest.h>

using namespace sharelm;
using namespace sharelm::unify;

namespace {

const AdapterRegistry& registry() {
    static const AdapterRegistry r = AdapterRegistry::builtin();
    return r;
}

RowResult convert(const char* source, const nlohmann::json& row, std::size_t line = 1) {
    const auto* adapter = registry().find(source);
    EXPECT_NE(adapter, nullptr) << source;
    return adapter->convert(row.dump(), line);
}

const std::string* meta(const UnifiedRecord& r, const std::string& key) {
    auto it = r.conversation_metadata.find(key);
    return it == r.conversation_metadata.end() ? nullptr : &it->second;
}

}  // namespace

TEST(Registry, BuiltinAdaptersMatchConfigFiles) {
    EXPECT_EQ(registry().names(),
              (std::vector<std::string>{"chatbot_arena", "hh_rlhf", "prism", "sharelm_plugin", "wildchat"}));
    for (const auto& entry : std::filesystem::directory_iterator(SHARELM_ADAPTER_DIR)) {
        auto config = adapter_config_from_json(nlohmann::json::parse(read_file(entry.path())));
        const auto* adapter = registry().find(config.source_name);
        ASSERT_NE(adapter, nullptr);
        EXPECT_EQ(adapter->config().mapping, config.mapping);
        EXPECT_EQ(adapter->config().gated, config.gated);
    }
    EXPECT_EQ(registry().find("nope"), nullptr);
}

TEST(Registry, ConfigErrors) {
    auto base = nlohmann::json::parse(R"({"source_name":"s","family":"plugin_native","input_format":"x",
        "license_note":"y","gated":false,"mapping":{}})");
    EXPECT_NO_THROW(adapter_config_from_json(base));
    auto bad = base;
    bad["family"] = "csv";
    EXPECT_THROW(adapter_config_from_json(bad), AdapterConfigError);
    bad = base;
    bad["extra"] = 1;
    EXPECT_THROW(adapter_config_from_json(bad), AdapterConfigError);
    bad = base;
    bad.erase("source_name");
    EXPECT_THROW(adapter_config_from_json(bad), AdapterConfigError);
    bad = base;
    bad["family"] = "pairwise_preference";
    EXPECT_THROW(make_adapter(adapter_config_from_json(bad)), AdapterConfigError);
}

TEST(Registry, AddReplaces) {
    AdapterRegistry r = AdapterRegistry::builtin();
    AdapterConfig config;
    config.source_name = "hh_rlhf";
    config.family = Family::plugin_native;
    r.add(config);
    EXPECT_EQ(r.find("hh_rlhf")->config().family, Family::plugin_native);
    EXPECT_EQ(r.names().size(), 5u);
}

TEST(Pairwise, ParsesDelimiterGrammar) {
    auto result = convert("hh_rlhf", {{"chosen", "\n\nHuman: Hi\n\nAssistant: Hello"},
                                      {"rejected", "\n\nHuman: Hi\n\nAssistant: Go away"}}, 7);
    ASSERT_TRUE(result.problems.empty());
    ASSERT_EQ(result.records.size(), 2u);
    const auto& chosen = result.records[0];
    ASSERT_EQ(chosen.conversation.size(), 2u);
    EXPECT_EQ(chosen.conversation[0].role, Role::user);
    EXPECT_EQ(chosen.conversation[0].text, "Hi");
    EXPECT_EQ(chosen.conversation[1].role, Role::model);
    EXPECT_EQ(chosen.conversation[1].text, "Hello");
    EXPECT_EQ(*meta(chosen, "preference"), "chosen");
    EXPECT_EQ(*meta(result.records[1], "preference"), "rejected");
    EXPECT_EQ(*meta(chosen, "pair_id"), *meta(result.records[1], "pair_id"));
    EXPECT_EQ(chosen.conversation_id, "hh_rlhf-7-chosen");
    EXPECT_EQ(result.records[1].conversation_id, "hh_rlhf-7-rejected");
    EXPECT_EQ(chosen.source, "hh_rlhf");
    EXPECT_FALSE(chosen.model_name);
    for (const auto& r : result.records) EXPECT_TRUE(validate_record(r).valid());
}

TEST(Pairwise, MultiTurnAndEmbeddedNewlines) {
    auto result = convert("hh_rlhf", {{"chosen", "\n\nHuman: a\nb\n\nAssistant: c\n\nHuman: d\n\nAssistant: e"},
                                      {"rejected", "\n\nHuman: a\nb\n\nAssistant: x"}});
    ASSERT_TRUE(result.problems.empty());
    ASSERT_EQ(result.records[0].conversation.size(), 4u);
    EXPECT_EQ(result.records[0].conversation[0].text, "a\nb");
    EXPECT_EQ(result.records[0].conversation[3].text, "e");
}

TEST(Pairwise, MissingRejectedSkipsRow) {
    auto result = convert("hh_rlhf", {{"chosen", "\n\nHuman: Hi\n\nAssistant: Hello"}});
    EXPECT_TRUE(result.records.empty());
    ASSERT_EQ(result.problems.size(), 1u);
    EXPECT_NE(result.problems[0].find("rejected"), std::string::npos);
}

TEST(Pairwise, MalformedTranscripts) {
    EXPECT_FALSE(convert("hh_rlhf", {{"chosen", "no delimiters"}, {"rejected", "\n\nHuman: x"}}).problems.empty());
    EXPECT_FALSE(convert("hh_rlhf", {{"chosen", "lead\n\nHuman: x"}, {"rejected", "\n\nHuman: x"}}).problems.empty());
    EXPECT_FALSE(registry().find("hh_rlhf")->convert("{broken", 1).problems.empty());
    EXPECT_EQ(registry().find("hh_rlhf")->records_per_row(), 2u);
}

TEST(Pairwise, UnknownFieldsPassThrough) {
    auto result = convert("hh_rlhf", {{"chosen", "\n\nHuman: a\n\nAssistant: b"},
                                      {"rejected", "\n\nHuman: a\n\nAssistant: c"},
                                      {"split", "train"}});
    ASSERT_TRUE(result.problems.empty());
    EXPECT_EQ(*meta(result.records[0], "x_split"), "train");
}

namespace {

nlohmann::json arena_row() {
    return {{"question_id", "q1"},
            {"model_a", "m1"},
            {"model_b", "m2"},
            {"winner", "model_a"},
            {"judge", "arena_user_1"},
            {"conversation_a", {{{"role", "user"}, {"content", "hi"}}, {{"role", "assistant"}, {"content", "A"}}}},
            {"conversation_b", {{{"role", "user"}, {"content", "hi"}}, {{"role", "assistant"}, {"content", "B"}}}},
            {"turn", 1},
            {"language", "English"},
            {"tstamp", 1682000000.5}};
}

}  // namespace

TEST(Arena, FieldMapping) {
    auto result = convert("chatbot_arena", arena_row());
    ASSERT_TRUE(result.problems.empty()) << result.problems[0];
    ASSERT_EQ(result.records.size(), 2u);
    const auto& a = result.records[0];
    const auto& b = result.records[1];
    EXPECT_EQ(a.model_name, "m1");
    EXPECT_EQ(b.model_name, "m2");
    EXPECT_EQ(*meta(a, "winner"), "model_a");
    EXPECT_EQ(*meta(b, "winner"), "model_a");
    EXPECT_EQ(*meta(a, "side"), "model_a");
    EXPECT_EQ(*meta(b, "side"), "model_b");
    EXPECT_EQ(*meta(a, "battle_id"), *meta(b, "battle_id"));
    EXPECT_EQ(*meta(a, "language"), "English");
    EXPECT_EQ(*meta(a, "turn_count"), "1");
    EXPECT_EQ(a.conversation_id, "chatbot_arena-q1-a");
    EXPECT_EQ(b.conversation_id, "chatbot_arena-q1-b");
    EXPECT_EQ(a.user_id, "arena_user_1");
    EXPECT_EQ(format_rfc3339(*a.timestamp), "2023-04-20T14:13:20Z");
    EXPECT_EQ(a.conversation[1].text, "A");
    EXPECT_EQ(b.conversation[1].text, "B");
}

TEST(Arena, TieLabels) {
    auto row = arena_row();
    row["winner"] = "tie";
    auto result = convert("chatbot_arena", row);
    EXPECT_EQ(*meta(result.records[0], "winner"), "tie");
    EXPECT_EQ(*meta(result.records[1], "winner"), "tie");
    row["winner"] = "tie (bothbad)";
    EXPECT_EQ(*meta(convert("chatbot_arena", row).records[0], "winner"), "tie");
}

TEST(Arena, UnknownWinnerSkipsRow) {
    auto row = arena_row();
    row["winner"] = "model_c";
    auto result = convert("chatbot_arena", row);
    EXPECT_TRUE(result.records.empty());
    EXPECT_FALSE(result.problems.empty());
}

TEST(Arena, SystemTurnsDropped) {
    auto row = arena_row();
    row["conversation_a"].insert(row["conversation_a"].begin(),
                               nlohmann::json::object({{"role", "system"}, {"content", "be nice"}}));
    auto result = convert("chatbot_arena", row);
    ASSERT_TRUE(result.problems.empty()) << ::testing::PrintToString(result.problems);
    EXPECT_EQ(result.records[0].conversation.size(), 2u);
    EXPECT_EQ(result.records[0].conversation[0].index, 0u);
}

TEST(Arena, MissingModel) {
    auto row = arena_row();
    row.erase("model_b");
    EXPECT_TRUE(convert("chatbot_arena", row).records.empty());
}

namespace {

nlohmann::json prism_row() {
    return {{"conversation_id", "c1"},
            {"user_id", "user7"},
            {"model_name", "gpt-4"},
            {"timestamp", "2024-01-15"},
            {"conversation_type", "unguided"},
            {"conversation_history",
             {{{"role", "user"}, {"content", "hello"}, {"score", nullptr}},
              {{"role", "model"}, {"content", "hi there"}, {"score", 80}},
              {{"role", "user"}, {"content", "more"}, {"score", nullptr}},
              {{"role", "model"}, {"content", "meh"}, {"score", 20}},
              {{"role", "user"}, {"content", "again"}, {"score", nullptr}},
              {{"role", "model"}, {"content", "ok"}, {"score", 50}}}},
            {"demographics", {{"birth_country", "BR"}, {"age", "25-34"}, {"pet", "cat"}}},
            {"included_in_balanced_subset", true}};
}

}  // namespace

TEST(Survey, DemographicsPassThrough) {
    auto result = convert("prism", prism_row());
    ASSERT_TRUE(result.problems.empty()) << result.problems[0];
    const auto& r = result.records.at(0);
    EXPECT_EQ(r.user_metadata.at("birth_country"), "BR");
    EXPECT_EQ(r.user_metadata.at("age"), "25-34");
    EXPECT_EQ(r.user_metadata.at("x_pet"), "cat");
    EXPECT_EQ(*meta(r, "conversation_type"), "unguided");
    EXPECT_EQ(*meta(r, "x_included_in_balanced_subset"), "true");
    EXPECT_EQ(r.conversation_id, "prism-c1");
    EXPECT_EQ(r.user_id, "user7");
    EXPECT_EQ(r.model_name, "gpt-4");
}

TEST(Survey, ScoreThresholdsFromConfig) {
    const auto& rating = registry().find("prism")->config().mapping.at("rating");
    const double up = rating.at("thumbs_up_above");
    const double down = rating.at("thumbs_down_below");
    auto result = convert("prism", prism_row());
    const auto& turns = result.records.at(0).conversation;
    auto expect_for = [&](double score) -> std::optional<Rating> {
        if (score > up) return Rating::thumbs_up;
        if (score < down) return Rating::thumbs_down;
        return std::nullopt;
    };
    EXPECT_EQ(turns[1].response_rating, expect_for(80));
    EXPECT_EQ(turns[3].response_rating, expect_for(20));
    EXPECT_EQ(turns[5].response_rating, expect_for(50));
    EXPECT_EQ(turns[1].response_rating, Rating::thumbs_up);
    EXPECT_EQ(turns[0].response_rating, std::nullopt);
}

TEST(Survey, DateOnlyTimestamp) {
    auto result = convert("prism", prism_row());
    EXPECT_EQ(format_rfc3339(*result.records.at(0).timestamp), "2024-01-15T00:00:00Z");
    auto line = serialize_record(result.records.at(0));
    EXPECT_NE(line.find("\"timestamp\":\"2024-01-15T00:00:00Z\""), std::string::npos);
}

TEST(Survey, UnparseableTimestampKept) {
    auto row = prism_row();
    row["timestamp"] = "last tuesday";
    auto result = convert("prism", row);
    ASSERT_TRUE(result.problems.empty());
    EXPECT_FALSE(result.records[0].timestamp);
    EXPECT_EQ(*meta(result.records[0], "x_timestamp"), "last tuesday");
}

TEST(Survey, BadRowsSkipped) {
    auto row = prism_row();
    row["conversation_history"] = "text";
    EXPECT_FALSE(convert("prism", row).problems.empty());
    row = prism_row();
    row["conversation_history"][0]["role"] = "moderator";
    EXPECT_FALSE(convert("prism", row).problems.empty());
    row = prism_row();
    row["conversation_history"] = nlohmann::json::array();
    EXPECT_FALSE(convert("prism", row).problems.empty());
    row = prism_row();
    row["demographics"] = "n/a";
    EXPECT_FALSE(convert("prism", row).problems.empty());
}

TEST(Survey, RowLevelDemographics) {
    nlohmann::json row{{"conversation_hash", "abc"},
                       {"hashed_ip", "ffee"},
                       {"model", "gpt-3.5-turbo"},
                       {"timestamp", "2023-04-09 00:02:53+00:00"},
                       {"conversation", {{{"role", "user"}, {"content", "hey"}}, {{"role", "assistant"}, {"content", "hi"}}}},
                       {"country", "Brazil"},
                       {"state", "Sao Paulo"},
                       {"language", "Portuguese"},
                       {"toxic", false}};
    auto result = convert("wildchat", row);
    ASSERT_TRUE(result.problems.empty()) << result.problems[0];
    const auto& r = result.records[0];
    EXPECT_EQ(r.user_metadata.at("country"), "Brazil");
    EXPECT_EQ(r.user_metadata.at("state"), "Sao Paulo");
    EXPECT_EQ(*meta(r, "language"), "Portuguese");
    EXPECT_EQ(*meta(r, "x_toxic"), "false");
    EXPECT_EQ(format_rfc3339(*r.timestamp), "2023-04-09T00:02:53Z");
    EXPECT_EQ(r.conversation[1].role, Role::model);
}

namespace {

UnifiedRecord native_record(const std::string& id) {
    UnifiedRecord r;
    r.conversation_id = id;
    r.conversation = {{0, Role::user, "hi", std::nullopt}, {1, Role::model, "hello", Rating::thumbs_down}};
    r.source = std::string(kPluginSource);
    r.model_name = "zephyr";
    return r;
}

}  // namespace

TEST(PluginNative, Identity) {
    auto line = serialize_record(native_record("p1"));
    auto result = registry().find("sharelm_plugin")->convert(line, 1);
    ASSERT_TRUE(result.problems.empty());
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0], native_record("p1"));
}

TEST(PluginNative, UnknownKeySkipped) {
    auto j = record_to_json(native_record("p1"));
    j["foo"] = 1;
    auto result = registry().find("sharelm_plugin")->convert(j.dump(), 1);
    EXPECT_TRUE(result.records.empty());
    EXPECT_FALSE(result.problems.empty());
}

TEST(PluginNative, ForeignSourceRejected) {
    auto r = native_record("p1");
    r.source = "hh_rlhf";
    EXPECT_FALSE(registry().find("sharelm_plugin")->convert(serialize_record(r), 1).problems.empty());
}
