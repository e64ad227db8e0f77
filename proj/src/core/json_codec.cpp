#include "sharelm/json_codec.hpp"

#include <algorithm>

namespace sharelm {

ParseError::ParseError(std::size_t offset, std::string reason)
    : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

namespace {

std::string describe(const ValidationReport& report) {
    std::string out = "invalid record:";
    for (const auto& v : report.violations) {
        out += " " + v.summary() + ";";
    }
    return out;
}

template <std::size_t N>
void check_keys(const nlohmann::json& value, const std::array<std::string_view, N>& names,
                const std::string& path) {
    if (!value.is_object()) {
        throw ParseError(0, path + ": expected object");
    }
    for (const auto& item : value.items()) {
        if (std::find(names.begin(), names.end(), item.key()) == names.end()) {
            throw ParseError(0, path + ": unknown key \"" + item.key() + "\"");
        }
    }
    for (auto name : names) {
        if (!value.contains(name)) {
            throw ParseError(0, path + ": missing key \"" + std::string(name) + "\"");
        }
    }
}

std::string require_string(const nlohmann::json& value, const std::string& path) {
    if (!value.is_string()) {
        throw ParseError(0, path + ": expected string");
    }
    return value.get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& value, const std::string& path) {
    if (value.is_null()) {
        return std::nullopt;
    }
    return require_string(value, path);
}

}  // namespace

InvalidRecord::InvalidRecord(ValidationReport report)
    : std::invalid_argument(describe(report)), report_(std::move(report)) {}

nlohmann::ordered_json message_to_json(const Message& message) {
    nlohmann::ordered_json out;
    out["index"] = message.index;
    out["role"] = to_string(message.role);
    out["text"] = message.text;
    out["response_rating"] = message.response_rating
                                 ? nlohmann::ordered_json(to_string(*message.response_rating))
                                 : nlohmann::ordered_json(nullptr);
    return out;
}

Message message_from_json(const nlohmann::json& value, const std::string& path) {
    check_keys(value, kMessageFieldNames, path);
    Message m;
    const auto& index = value["index"];
    if (!index.is_number_unsigned()) {
        throw ParseError(0, path + ".index: expected non-negative integer");
    }
    m.index = index.get<std::size_t>();
    auto role = parse_role(require_string(value["role"], path + ".role"));
    if (!role) {
        throw ParseError(0, path + ".role: expected \"user\" or \"model\"");
    }
    m.role = *role;
    m.text = require_string(value["text"], path + ".text");
    if (auto rating = optional_string(value["response_rating"], path + ".response_rating")) {
        m.response_rating = parse_rating(*rating);
        if (!m.response_rating) {
            throw ParseError(0, path + ".response_rating: expected thumbs_up or thumbs_down");
        }
    }
    return m;
}

nlohmann::ordered_json string_map_to_json(const StringMap& values) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [key, value] : values) {
        out[key] = value;
    }
    return out;
}

StringMap string_map_from_json(const nlohmann::json& value, const std::string& path) {
    if (!value.is_object()) {
        throw ParseError(0, path + ": expected object");
    }
    StringMap out;
    for (const auto& item : value.items()) {
        out.emplace(item.key(), require_string(item.value(), path + "." + item.key()));
    }
    return out;
}

nlohmann::ordered_json record_to_json(const UnifiedRecord& record) {
    nlohmann::ordered_json out;
    out["conversation_id"] = record.conversation_id;
    auto& messages = out["conversation"] = nlohmann::ordered_json::array();
    for (const auto& m : record.conversation) {
        messages.push_back(message_to_json(m));
    }
    out["model_name"] = record.model_name ? nlohmann::ordered_json(*record.model_name)
                                          : nlohmann::ordered_json(nullptr);
    out["user_id"] =
        record.user_id ? nlohmann::ordered_json(*record.user_id) : nlohmann::ordered_json(nullptr);
    out["timestamp"] = record.timestamp ? nlohmann::ordered_json(format_rfc3339(*record.timestamp))
                                        : nlohmann::ordered_json(nullptr);
    out["source"] = record.source;
    out["user_metadata"] = string_map_to_json(record.user_metadata);
    out["conversation_metadata"] = string_map_to_json(record.conversation_metadata);
    return out;
}

UnifiedRecord record_from_json(const nlohmann::json& value) {
    check_keys(value, kRecordFieldNames, "record");
    UnifiedRecord r;
    r.conversation_id = require_string(value["conversation_id"], "conversation_id");
    const auto& messages = value["conversation"];
    if (!messages.is_array()) {
        throw ParseError(0, "conversation: expected array");
    }
    r.conversation.reserve(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) {
        r.conversation.push_back(
            message_from_json(messages[i], "conversation[" + std::to_string(i) + "]"));
    }
    r.model_name = optional_string(value["model_name"], "model_name");
    r.user_id = optional_string(value["user_id"], "user_id");
    if (auto ts = optional_string(value["timestamp"], "timestamp")) {
        r.timestamp = parse_rfc3339(*ts);
        if (!r.timestamp) {
            throw ParseError(0, "timestamp: expected YYYY-MM-DDTHH:MM:SSZ");
        }
    }
    r.source = require_string(value["source"], "source");
    r.user_metadata = string_map_from_json(value["user_metadata"], "user_metadata");
    r.conversation_metadata =
        string_map_from_json(value["conversation_metadata"], "conversation_metadata");
    return r;
}

std::string serialize_record(const UnifiedRecord& record) {
    auto report = validate_record(record);
    if (!report.valid()) {
        throw InvalidRecord(std::move(report));
    }
    return record_to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

UnifiedRecord parse_record(std::string_view line) {
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, "malformed JSON");
    }
    return record_from_json(value);
}

}  // namespace sharelm
