#pragma once

#include "sharelm/time.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sharelm {

enum class Role { user, model };
enum class Rating { thumbs_up, thumbs_down };

std::string_view to_string(Role role);
std::string_view to_string(Rating rating);
std::optional<Role> parse_role(std::string_view text);
std::optional<Rating> parse_rating(std::string_view text);

/// One turn of a conversation. Only model turns carry a response rating.
struct Message {
    std::size_t index = 0;
    Role role = Role::user;
    std::string text;
    std::optional<Rating> response_rating;

    friend bool operator==(const Message&, const Message&) = default;
};

using StringMap = std::map<std::string, std::string>;

inline constexpr std::string_view kPluginSource = "sharelm_plugin";
inline constexpr std::string_view kConversationRatingKey = "conversation_rating";

/// Field names of the serialized release schema, in serialization order.
inline constexpr std::array<std::string_view, 8> kRecordFieldNames{
    "conversation_id", "conversation", "model_name",           "user_id",
    "timestamp",       "source",       "user_metadata",        "conversation_metadata",
};

inline constexpr std::array<std::string_view, 4> kMessageFieldNames{
    "index", "role", "text", "response_rating"};

/// The unified release record: the single interchange format of the platform.
/// An empty conversation_id or source means the field is missing.
struct UnifiedRecord {
    std::string conversation_id;
    std::vector<Message> conversation;
    std::optional<std::string> model_name;
    std::optional<std::string> user_id;
    std::optional<Timestamp> timestamp;
    std::string source;
    StringMap user_metadata;
    StringMap conversation_metadata;

    friend bool operator==(const UnifiedRecord&, const UnifiedRecord&) = default;
};

struct Violation {
    std::string field_path;
    std::string rule;
    std::string detail;

    /// "field_path: rule", the compact form used in upload acks and reports.
    std::string summary() const;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }
    bool has(std::string_view field_path, std::string_view rule) const;
};

/// Enumerates every violated schema rule. Never throws for record contents.
ValidationReport validate_record(const UnifiedRecord& record);

bool is_valid_utf8(std::string_view text);

/// True when text contains something other than ASCII whitespace.
bool has_visible_text(std::string_view text);

}  // namespace sharelm
