#pragma once

// Helpers shared by the family adapters. Private to the unifier library.

#include "sharelm/unifier/adapter.hpp"

#include <set>
#include <string>

namespace sharelm::unify::detail {

using nlohmann::json;

/// Reads mapping[key] as a string; nullopt when absent or null.
std::optional<std::string> mapping_string(const json& mapping, const char* key);
std::string mapping_string_or(const json& mapping, const char* key, std::string fallback);

/// String form of a scalar source value; objects and arrays are dumped.
std::string stringify(const json& value);

/// Looks up a row field by mapped name. Marks it consumed.
const json* take(const json& row, const std::optional<std::string>& field, std::set<std::string>& consumed);

/// Copies every row key not in `consumed` into metadata as "x_<key>".
void pass_through(const json& row, const std::set<std::string>& consumed, StringMap& metadata);

/// Local id from the mapped id field, or the line number when unmapped.
/// Returns nullopt with a problem when the field is mapped but unusable.
std::optional<std::string> local_id(const json& row, const std::optional<std::string>& id_field, std::size_t line_number,
                                    std::set<std::string>& consumed, std::vector<std::string>& problems);

/// Normalized timestamp for a string or epoch-number value. Unparseable
/// values keep their raw form under "x_<field>".
std::optional<Timestamp> timestamp_value(const json& value, const std::string& field, StringMap& metadata);

/// Maps a numeric per-turn score to a rating: strictly above `up_above` is
/// thumbs_up, strictly below `down_below` is thumbs_down, otherwise none.
struct RatingRule {
    std::string score_field;
    double up_above = 0;
    double down_below = 0;

    std::optional<Rating> rate(const json& score) const;
};

/// Converts a role/content turn list. `roles` maps source role names to
/// "user", "model", or null (turn dropped).
std::vector<Message> turns_from_list(const json& turns, const json& roles, const std::string& role_field,
                                     const std::string& text_field, const std::string& path,
                                     std::vector<std::string>& problems, const RatingRule* rating = nullptr);

/// Parses one JSON-Lines row that must be an object.
std::optional<json> parse_row(std::string_view line, std::vector<std::string>& problems);

/// Appends the validate_record summaries of each record to problems.
void validate_all(const std::vector<UnifiedRecord>& records, std::vector<std::string>& problems);

std::unique_ptr<SourceAdapter> make_pairwise_adapter(AdapterConfig config);
std::unique_ptr<SourceAdapter> make_arena_adapter(AdapterConfig config);
std::unique_ptr<SourceAdapter> make_survey_adapter(AdapterConfig config);
std::unique_ptr<SourceAdapter> make_plugin_native_adapter(AdapterConfig config);

}  // namespace sharelm::unify::detail
