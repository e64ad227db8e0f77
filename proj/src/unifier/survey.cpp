// Survey-style conversations: a turn list with optional per-turn scores plus
// participant demographics.

#include "mapping.hpp"

namespace sharelm::unify::detail {

namespace {

class SurveyAdapter final : public SourceAdapter {
public:
    explicit SurveyAdapter(AdapterConfig config) : SourceAdapter(std::move(config)) {
        const json& m = this->config().mapping;
        id_field_ = mapping_string_or(m, "id_field", "conversation_id");
        user_id_field_ = mapping_string(m, "user_id_field");
        model_field_ = mapping_string(m, "model_field");
        timestamp_field_ = mapping_string(m, "timestamp_field");
        turns_field_ = mapping_string_or(m, "turns_field", "conversation");
        role_field_ = mapping_string_or(m, "role_field", "role");
        text_field_ = mapping_string_or(m, "text_field", "content");
        demographics_field_ = mapping_string(m, "demographics_field");
        roles_ = m.value("roles", json{{"user", "user"}, {"model", "model"}, {"assistant", "model"}});
        metadata_fields_ = m.value("metadata_fields", json::object());
        auto keys = m.value("demographic_keys", json::array());
        auto row_fields = m.value("row_demographic_fields", json::array());
        if (!roles_.is_object() || !metadata_fields_.is_object() || !keys.is_array() || !row_fields.is_array()) {
            throw AdapterConfigError(source_name() + ": malformed mapping");
        }
        for (const auto& k : keys) demographic_keys_.insert(k.get<std::string>());
        for (const auto& k : row_fields) row_demographic_fields_.push_back(k.get<std::string>());
        if (m.contains("rating") && !m["rating"].is_null()) {
            const json& r = m["rating"];
            if (!r.is_object() || !r.contains("thumbs_up_above") || !r.contains("thumbs_down_below") ||
                !r["thumbs_up_above"].is_number() || !r["thumbs_down_below"].is_number()) {
                throw AdapterConfigError(source_name() + ": rating needs numeric thumbs_up_above and thumbs_down_below");
            }
            RatingRule rule;
            rule.score_field = mapping_string_or(m, "score_field", "score");
            rule.up_above = r["thumbs_up_above"].get<double>();
            rule.down_below = r["thumbs_down_below"].get<double>();
            if (rule.down_below > rule.up_above) {
                throw AdapterConfigError(source_name() + ": thumbs_down_below exceeds thumbs_up_above");
            }
            rating_ = rule;
        }
    }

    RowResult convert(std::string_view line, std::size_t line_number) const override {
        RowResult result;
        auto row = parse_row(line, result.problems);
        if (!row) return result;
        std::set<std::string> consumed;
        auto local = local_id(*row, id_field_, line_number, consumed, result.problems);
        const json* turns = take(*row, turns_field_, consumed);
        UnifiedRecord record;
        record.conversation = turns_from_list(turns ? *turns : json(), roles_, role_field_, text_field_, turns_field_,
                                              result.problems, rating_ ? &*rating_ : nullptr);
        if (!result.problems.empty()) return result;

        record.conversation_id = source_name() + "-" + *local;
        record.source = source_name();
        if (const json* user = take(*row, user_id_field_, consumed)) record.user_id = stringify(*user);
        if (const json* model = take(*row, model_field_, consumed)) record.model_name = stringify(*model);
        if (const json* ts = take(*row, timestamp_field_, consumed)) {
            record.timestamp = timestamp_value(*ts, *timestamp_field_, record.conversation_metadata);
        }
        if (const json* demographics = take(*row, demographics_field_, consumed)) {
            if (!demographics->is_object()) {
                result.problems.push_back(*demographics_field_ + ": expected an object");
                return result;
            }
            for (const auto& [key, value] : demographics->items()) {
                add_demographic(key, value, record.user_metadata);
            }
        }
        for (const auto& field : row_demographic_fields_) {
            if (const json* value = take(*row, field, consumed)) add_demographic(field, *value, record.user_metadata);
        }
        for (const auto& [field, key] : metadata_fields_.items()) {
            if (const json* v = take(*row, field, consumed)) {
                record.conversation_metadata[key.is_string() ? key.get<std::string>() : field] = stringify(*v);
            }
        }
        pass_through(*row, consumed, record.conversation_metadata);
        result.records.push_back(std::move(record));
        validate_all(result.records, result.problems);
        if (!result.problems.empty()) result.records.clear();
        return result;
    }

private:
    void add_demographic(const std::string& key, const json& value, StringMap& out) const {
        if (value.is_null() || key.empty()) return;
        bool known = demographic_keys_.count(key) || std::find(row_demographic_fields_.begin(),
                                                              row_demographic_fields_.end(),
                                                              key) != row_demographic_fields_.end();
        out[known ? key : std::string(kPassthroughPrefix) + key] = stringify(value);
    }

    std::string id_field_;
    std::optional<std::string> user_id_field_;
    std::optional<std::string> model_field_;
    std::optional<std::string> timestamp_field_;
    std::string turns_field_;
    std::string role_field_;
    std::string text_field_;
    std::optional<std::string> demographics_field_;
    json roles_;
    json metadata_fields_;
    std::set<std::string> demographic_keys_;
    std::vector<std::string> row_demographic_fields_;
    std::optional<RatingRule> rating_;
};

}  // namespace

std::unique_ptr<SourceAdapter> make_survey_adapter(AdapterConfig config) {
    return std::make_unique<SurveyAdapter>(std::move(config));
}

}  // namespace sharelm::unify::detail
