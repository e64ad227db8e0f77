#include "sharelm/unifier/adapter.hpp"

#include "mapping.hpp"

#include <algorithm>

namespace sharelm::unify {

std::string_view to_string(Family family) {
    switch (family) {
    case Family::pairwise_preference:
        return "pairwise_preference";
    case Family::arena_pairs:
        return "arena_pairs";
    case Family::survey_conversations:
        return "survey_conversations";
    case Family::plugin_native:
        return "plugin_native";
    }
    return "plugin_native";
}

std::optional<Family> parse_family(std::string_view text) {
    for (auto f : {Family::pairwise_preference, Family::arena_pairs, Family::survey_conversations,
                   Family::plugin_native}) {
        if (to_string(f) == text) return f;
    }
    return std::nullopt;
}

AdapterConfig adapter_config_from_json(const nlohmann::json& value) {
    if (!value.is_object()) throw AdapterConfigError("adapter config: expected object");
    AdapterConfig config;
    auto string_field = [&](const char* key, bool required) -> std::string {
        if (!value.contains(key)) {
            if (required) throw AdapterConfigError(std::string("adapter config: missing ") + key);
            return {};
        }
        if (!value[key].is_string()) throw AdapterConfigError(std::string("adapter config: ") + key + " must be a string");
        return value[key].get<std::string>();
    };
    for (const auto& [key, _] : value.items()) {
        if (key != "source_name" && key != "family" && key != "input_format" && key != "license_note" &&
            key != "gated" && key != "mapping") {
            throw AdapterConfigError("adapter config: unknown key " + key);
        }
    }
    config.source_name = string_field("source_name", true);
    if (config.source_name.empty()) throw AdapterConfigError("adapter config: empty source_name");
    auto family = parse_family(string_field("family", true));
    if (!family) throw AdapterConfigError("adapter config " + config.source_name + ": unknown family");
    config.family = *family;
    config.input_format = string_field("input_format", false);
    config.license_note = string_field("license_note", false);
    if (value.contains("gated")) {
        if (!value["gated"].is_boolean()) throw AdapterConfigError("adapter config: gated must be a boolean");
        config.gated = value["gated"].get<bool>();
    }
    if (value.contains("mapping")) {
        if (!value["mapping"].is_object()) throw AdapterConfigError("adapter config: mapping must be an object");
        config.mapping = value["mapping"];
    }
    return config;
}

namespace {

struct MappingKeys {
    std::vector<std::string_view> required;
    std::vector<std::string_view> optional;
};

// Structural fields have no silent defaults, and unknown keys are rejected
// so a misspelled key cannot fall back to a default field name.
MappingKeys mapping_keys(Family family) {
    switch (family) {
    case Family::pairwise_preference:
        return {{"chosen_field", "rejected_field", "user_delimiter", "model_delimiter"},
                {"id_field", "model_name", "model_field", "timestamp_field"}};
    case Family::arena_pairs:
        return {{"model_a_field", "model_b_field", "conversation_a_field", "conversation_b_field", "winner_field",
                 "role_field", "text_field"},
                {"id_field", "user_id_field", "timestamp_field", "roles", "winner_labels", "metadata_fields"}};
    case Family::survey_conversations:
        return {{"turns_field", "role_field", "text_field"},
                {"id_field", "user_id_field", "model_field", "timestamp_field", "demographics_field", "roles",
                 "metadata_fields", "demographic_keys", "row_demographic_fields", "rating", "score_field"}};
    case Family::plugin_native:
        return {};
    }
    return {};
}

void check_mapping_keys(const AdapterConfig& config) {
    auto keys = mapping_keys(config.family);
    for (auto key : keys.required) {
        if (!config.mapping.contains(key) || config.mapping[std::string(key)].is_null()) {
            throw AdapterConfigError(config.source_name + ": mapping." + std::string(key) + " is required");
        }
    }
    for (const auto& [key, _] : config.mapping.items()) {
        auto known = [&](const std::vector<std::string_view>& list) {
            return std::find(list.begin(), list.end(), key) != list.end();
        };
        if (!known(keys.required) && !known(keys.optional)) {
            throw AdapterConfigError(config.source_name + ": unknown mapping key " + key);
        }
    }
}

}  // namespace

std::unique_ptr<SourceAdapter> make_adapter(AdapterConfig config) {
    check_mapping_keys(config);
    switch (config.family) {
    case Family::pairwise_preference:
        return detail::make_pairwise_adapter(std::move(config));
    case Family::arena_pairs:
        return detail::make_arena_adapter(std::move(config));
    case Family::survey_conversations:
        return detail::make_survey_adapter(std::move(config));
    case Family::plugin_native:
        return detail::make_plugin_native_adapter(std::move(config));
    }
    throw AdapterConfigError("unknown family");
}

AdapterRegistry AdapterRegistry::builtin() {
    AdapterRegistry registry;
    for (const auto& [file, text] : builtin_adapter_configs()) {
        try {
            registry.add(adapter_config_from_json(nlohmann::json::parse(text)));
        } catch (const nlohmann::json::parse_error& e) {
            throw AdapterConfigError(file + ": " + e.what());
        }
    }
    return registry;
}

void AdapterRegistry::add(AdapterConfig config) {
    std::string name = config.source_name;
    adapters_[name] = make_adapter(std::move(config));
}

const SourceAdapter* AdapterRegistry::find(std::string_view source_name) const {
    auto it = adapters_.find(source_name);
    return it == adapters_.end() ? nullptr : it->second.get();
}

std::vector<std::string> AdapterRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : adapters_) out.push_back(name);
    return out;
}

namespace detail {

std::optional<std::string> mapping_string(const json& mapping, const char* key) {
    if (!mapping.contains(key) || mapping[key].is_null()) return std::nullopt;
    if (!mapping[key].is_string()) throw AdapterConfigError(std::string("mapping.") + key + ": expected string");
    return mapping[key].get<std::string>();
}

std::string mapping_string_or(const json& mapping, const char* key, std::string fallback) {
    return mapping_string(mapping, key).value_or(std::move(fallback));
}

std::string stringify(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_null()) return "null";
    return value.dump(-1, ' ', false, json::error_handler_t::replace);
}

const json* take(const json& row, const std::optional<std::string>& field, std::set<std::string>& consumed) {
    if (!field) return nullptr;
    consumed.insert(*field);
    auto it = row.find(*field);
    if (it == row.end() || it->is_null()) return nullptr;
    return &*it;
}

void pass_through(const json& row, const std::set<std::string>& consumed, StringMap& metadata) {
    for (const auto& [key, value] : row.items()) {
        if (consumed.count(key) || key.empty() || value.is_null()) continue;
        metadata[std::string(kPassthroughPrefix) + key] = stringify(value);
    }
}

std::optional<std::string> local_id(const json& row, const std::optional<std::string>& id_field, std::size_t line_number,
                                    std::set<std::string>& consumed, std::vector<std::string>& problems) {
    if (!id_field) return std::to_string(line_number);
    const json* value = take(row, id_field, consumed);
    if (!value || !(value->is_string() || value->is_number_integer() || value->is_number_unsigned())) {
        problems.push_back(*id_field + ": missing or not a string/integer id");
        return std::nullopt;
    }
    std::string id = stringify(*value);
    if (id.empty() || !is_valid_utf8(id)) {
        problems.push_back(*id_field + ": empty id");
        return std::nullopt;
    }
    return id;
}

std::optional<Timestamp> timestamp_value(const json& value, const std::string& field, StringMap& metadata) {
    std::optional<Timestamp> ts;
    if (value.is_string()) {
        ts = normalize_timestamp(value.get<std::string>());
    } else if (value.is_number()) {
        ts = normalize_timestamp(value.dump());
    }
    if (ts && !is_rfc3339_representable(*ts)) ts.reset();
    if (!ts) metadata[std::string(kPassthroughPrefix) + field] = stringify(value);
    return ts;
}

std::vector<Message> turns_from_list(const json& turns, const json& roles, const std::string& role_field,
                                     const std::string& text_field, const std::string& path,
                                     std::vector<std::string>& problems, const RatingRule* rating) {
    std::vector<Message> out;
    if (!turns.is_array()) {
        problems.push_back(path + ": expected a list of turns");
        return out;
    }
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const json& turn = turns[i];
        std::string where = path + "[" + std::to_string(i) + "]";
        if (!turn.is_object() || !turn.contains(role_field) || !turn[role_field].is_string()) {
            problems.push_back(where + ": missing " + role_field);
            continue;
        }
        std::string source_role = turn[role_field].get<std::string>();
        if (!roles.contains(source_role)) {
            problems.push_back(where + ": unmapped role \"" + source_role + "\"");
            continue;
        }
        const json& mapped = roles[source_role];
        if (mapped.is_null()) continue;
        auto role = mapped.is_string() ? parse_role(mapped.get<std::string>()) : std::nullopt;
        if (!role) {
            problems.push_back(where + ": role table maps \"" + source_role + "\" to an unknown role");
            continue;
        }
        if (!turn.contains(text_field) || !turn[text_field].is_string()) {
            problems.push_back(where + ": missing " + text_field);
            continue;
        }
        std::string text = turn[text_field].get<std::string>();
        if (is_valid_utf8(text) && !has_visible_text(text)) continue;
        Message m;
        m.index = out.size();
        m.role = *role;
        m.text = std::move(text);
        if (rating && m.role == Role::model && turn.contains(rating->score_field)) {
            m.response_rating = rating->rate(turn[rating->score_field]);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::optional<Rating> RatingRule::rate(const json& score) const {
    if (!score.is_number()) return std::nullopt;
    double value = score.get<double>();
    if (value > up_above) return Rating::thumbs_up;
    if (value < down_below) return Rating::thumbs_down;
    return std::nullopt;
}

std::optional<json> parse_row(std::string_view line, std::vector<std::string>& problems) {
    json row;
    try {
        row = json::parse(line);
    } catch (const json::parse_error& e) {
        problems.push_back("malformed JSON at byte " + std::to_string(e.byte));
        return std::nullopt;
    }
    if (!row.is_object()) {
        problems.push_back("row is not a JSON object");
        return std::nullopt;
    }
    return row;
}

void validate_all(const std::vector<UnifiedRecord>& records, std::vector<std::string>& problems) {
    for (const auto& record : records) {
        for (const auto& v : validate_record(record).violations) {
            problems.push_back(record.conversation_id + ": " + v.summary());
        }
    }
}

}  // namespace detail

}  // namespace sharelm::unify
