// Arena battles: one row holds two model conversations on the same prompt,
// both model names, and a winner label.

#include "mapping.hpp"

namespace sharelm::unify::detail {

namespace {

class ArenaAdapter final : public SourceAdapter {
public:
    explicit ArenaAdapter(AdapterConfig config) : SourceAdapter(std::move(config)) {
        const json& m = this->config().mapping;
        id_field_ = mapping_string_or(m, "id_field", "battle_id");
        model_a_field_ = mapping_string_or(m, "model_a_field", "model_a");
        model_b_field_ = mapping_string_or(m, "model_b_field", "model_b");
        conversation_a_field_ = mapping_string_or(m, "conversation_a_field", "conversation_a");
        conversation_b_field_ = mapping_string_or(m, "conversation_b_field", "conversation_b");
        winner_field_ = mapping_string_or(m, "winner_field", "winner");
        user_id_field_ = mapping_string(m, "user_id_field");
        timestamp_field_ = mapping_string(m, "timestamp_field");
        role_field_ = mapping_string_or(m, "role_field", "role");
        text_field_ = mapping_string_or(m, "text_field", "content");
        roles_ = m.value("roles", json{{"user", "user"}, {"assistant", "model"}});
        winner_labels_ = m.value("winner_labels", json{{"model_a", "model_a"}, {"model_b", "model_b"}, {"tie", "tie"}});
        metadata_fields_ = m.value("metadata_fields", json::object());
        if (!roles_.is_object() || !winner_labels_.is_object() || !metadata_fields_.is_object()) {
            throw AdapterConfigError(source_name() + ": roles, winner_labels and metadata_fields must be objects");
        }
        for (const auto& [label, mapped] : winner_labels_.items()) {
            if (mapped != "model_a" && mapped != "model_b" && mapped != "tie") {
                throw AdapterConfigError(source_name() + ": winner label " + label + " maps outside model_a/model_b/tie");
            }
        }
    }

    std::size_t records_per_row() const override { return 2; }

    RowResult convert(std::string_view line, std::size_t line_number) const override {
        RowResult result;
        auto row = parse_row(line, result.problems);
        if (!row) return result;
        std::set<std::string> consumed;
        auto battle = local_id(*row, id_field_, line_number, consumed, result.problems);

        std::string winner;
        const json* label = take(*row, winner_field_, consumed);
        if (!label || !label->is_string()) {
            result.problems.push_back(winner_field_ + ": missing winner label");
        } else if (!winner_labels_.contains(label->get<std::string>())) {
            result.problems.push_back(winner_field_ + ": unknown winner label \"" + label->get<std::string>() + "\"");
        } else {
            winner = winner_labels_[label->get<std::string>()].get<std::string>();
        }
        auto model = [&](const std::string& field) -> std::optional<std::string> {
            const json* v = take(*row, field, consumed);
            if (!v || !v->is_string() || v->get<std::string>().empty()) {
                result.problems.push_back(field + ": missing model name");
                return std::nullopt;
            }
            return v->get<std::string>();
        };
        auto model_a = model(model_a_field_);
        auto model_b = model(model_b_field_);
        const json* conv_a = take(*row, conversation_a_field_, consumed);
        const json* conv_b = take(*row, conversation_b_field_, consumed);
        std::vector<Message> messages_a =
            turns_from_list(conv_a ? *conv_a : json(), roles_, role_field_, text_field_, conversation_a_field_, result.problems);
        std::vector<Message> messages_b =
            turns_from_list(conv_b ? *conv_b : json(), roles_, role_field_, text_field_, conversation_b_field_, result.problems);
        if (!result.problems.empty()) return result;

        UnifiedRecord base;
        base.source = source_name();
        if (const json* user = take(*row, user_id_field_, consumed); user && !user->is_null()) {
            base.user_id = stringify(*user);
        }
        if (const json* ts = take(*row, timestamp_field_, consumed)) {
            base.timestamp = timestamp_value(*ts, *timestamp_field_, base.conversation_metadata);
        }
        for (const auto& [field, key] : metadata_fields_.items()) {
            if (const json* v = take(*row, field, consumed)) {
                base.conversation_metadata[key.is_string() ? key.get<std::string>() : field] = stringify(*v);
            }
        }
        pass_through(*row, consumed, base.conversation_metadata);
        std::string battle_id = source_name() + "-" + *battle;
        base.conversation_metadata["battle_id"] = battle_id;
        base.conversation_metadata["winner"] = winner;

        for (auto [side, name, messages] : {std::tuple{"a", &model_a, &messages_a}, std::tuple{"b", &model_b, &messages_b}}) {
            UnifiedRecord record = base;
            record.conversation_id = battle_id + "-" + side;
            record.model_name = *name;
            record.conversation = std::move(*messages);
            record.conversation_metadata["side"] = std::string("model_") + side;
            result.records.push_back(std::move(record));
        }
        validate_all(result.records, result.problems);
        if (!result.problems.empty()) result.records.clear();
        return result;
    }

private:
    std::string id_field_;
    std::string model_a_field_;
    std::string model_b_field_;
    std::string conversation_a_field_;
    std::string conversation_b_field_;
    std::string winner_field_;
    std::optional<std::string> user_id_field_;
    std::optional<std::string> timestamp_field_;
    std::string role_field_;
    std::string text_field_;
    json roles_;
    json winner_labels_;
    json metadata_fields_;
};

}  // namespace

std::unique_ptr<SourceAdapter> make_arena_adapter(AdapterConfig config) {
    return std::make_unique<ArenaAdapter>(std::move(config));
}

}  // namespace sharelm::unify::detail
