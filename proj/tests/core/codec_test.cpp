#include "generators.hpp"

#include "sharelm/json_codec.hpp"

#include <gtest/gtest.h>

using namespace sharelm;

TEST(Serialize, MinimalRecord) {
    UnifiedRecord r;
    r.conversation_id = "c1";
    r.conversation = {{0, Role::user, "hi", std::nullopt}};
    r.source = "test";
    auto line = serialize_record(r);
    EXPECT_NE(line.find("\"conversation_id\":\"c1\""), std::string::npos);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(line,
              "{\"conversation_id\":\"c1\",\"conversation\":[{\"index\":0,\"role\":\"user\",\"text\":\"hi\","
              "\"response_rating\":null}],\"model_name\":null,\"user_id\":null,\"timestamp\":null,"
              "\"source\":\"test\",\"user_metadata\":{},\"conversation_metadata\":{}}");
}

TEST(Serialize, TimestampPassthrough) {
    UnifiedRecord r;
    r.conversation_id = "c1";
    r.conversation = {{0, Role::user, "hi", std::nullopt}};
    r.source = "test";
    r.timestamp = parse_rfc3339("2024-01-02T03:04:05Z");
    EXPECT_NE(serialize_record(r).find("\"timestamp\":\"2024-01-02T03:04:05Z\""), std::string::npos);
}

TEST(Serialize, RefusesInvalidRecord) {
    UnifiedRecord r;
    r.conversation_id = "c1";
    r.source = "test";
    try {
        serialize_record(r);
        FAIL() << "expected InvalidRecord";
    } catch (const InvalidRecord& e) {
        EXPECT_TRUE(e.report().has("conversation", "non-empty"));
    }
}

TEST(Parse, EmptyObjectIsMissingId) {
    try {
        parse_record("{}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(e.reason().find("conversation_id"), std::string::npos);
    }
}

TEST(Parse, UnknownKeyRejected) {
    UnifiedRecord r;
    r.conversation_id = "c1";
    r.conversation = {{0, Role::user, "hi", std::nullopt}};
    r.source = "test";
    auto j = record_to_json(r);
    j["foo"] = 1;
    try {
        parse_record(j.dump());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(e.reason().find("foo"), std::string::npos);
    }
}

TEST(Parse, MalformedJsonReportsOffset) {
    try {
        parse_record("{\"conversation_id\": ");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_GT(e.offset(), 0u);
    }
}

TEST(Parse, WrongTypesRejected) {
    const char* base =
        R"({"conversation_id":"c","conversation":[{"index":0,"role":"user","text":"t","response_rating":null}],)"
        R"("model_name":null,"user_id":null,"timestamp":null,"source":"s","user_metadata":{},"conversation_metadata":{}})";
    EXPECT_NO_THROW(parse_record(base));
    auto mutate = [&](const std::string& key, nlohmann::json value) {
        auto j = nlohmann::json::parse(base);
        j[key] = std::move(value);
        return j.dump();
    };
    EXPECT_THROW(parse_record(mutate("conversation_id", 5)), ParseError);
    EXPECT_THROW(parse_record(mutate("conversation", "x")), ParseError);
    EXPECT_THROW(parse_record(mutate("timestamp", "2024-01-02")), ParseError);
    EXPECT_THROW(parse_record(mutate("user_metadata", {{"a", 1}})), ParseError);
    EXPECT_THROW(parse_record(mutate("model_name", 3)), ParseError);
    auto j = nlohmann::json::parse(base);
    j["conversation"][0]["role"] = "assistant";
    EXPECT_THROW(parse_record(j.dump()), ParseError);
    j = nlohmann::json::parse(base);
    j["conversation"][0].erase("response_rating");
    EXPECT_THROW(parse_record(j.dump()), ParseError);
    EXPECT_THROW(parse_record("[]"), ParseError);
}

TEST(RoundTrip, GeneratedRecordsSurvive) {
    sharelm::testing::Rng rng(20240101);
    for (int i = 0; i < 10000; ++i) {
        auto r = sharelm::testing::random_valid_record(rng);
        auto line = serialize_record(r);
        ASSERT_EQ(parse_record(line), r) << line;
        ASSERT_EQ(serialize_record(parse_record(line)), line);
    }
}

TEST(RoundTrip, FieldNamesAreExactlyTheSchema) {
    sharelm::testing::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto j = nlohmann::ordered_json::parse(serialize_record(sharelm::testing::random_valid_record(rng)));
        std::vector<std::string> keys;
        for (const auto& item : j.items()) keys.push_back(item.key());
        ASSERT_EQ(keys, (std::vector<std::string>{"conversation_id", "conversation", "model_name", "user_id",
                                                  "timestamp", "source", "user_metadata", "conversation_metadata"}));
        for (const auto& m : j["conversation"]) {
            std::vector<std::string> mkeys;
            for (const auto& item : m.items()) mkeys.push_back(item.key());
            ASSERT_EQ(mkeys, (std::vector<std::string>{"index", "role", "text", "response_rating"}));
        }
    }
}
