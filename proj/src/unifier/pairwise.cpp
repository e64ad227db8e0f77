// Preference pairs: one row holds a chosen and a rejected transcript, each a
// single string with "\n\nHuman:" / "\n\nAssistant:" style turn delimiters.

#include "mapping.hpp"

namespace sharelm::unify::detail {

namespace {

std::string_view trim(std::string_view s) {
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && space(s.front())) s.remove_prefix(1);
    while (!s.empty() && space(s.back())) s.remove_suffix(1);
    return s;
}

class PairwiseAdapter final : public SourceAdapter {
public:
    explicit PairwiseAdapter(AdapterConfig config) : SourceAdapter(std::move(config)) {
        const json& m = this->config().mapping;
        id_field_ = mapping_string(m, "id_field");
        chosen_field_ = mapping_string_or(m, "chosen_field", "chosen");
        rejected_field_ = mapping_string_or(m, "rejected_field", "rejected");
        user_delimiter_ = mapping_string_or(m, "user_delimiter", "\n\nHuman:");
        model_delimiter_ = mapping_string_or(m, "model_delimiter", "\n\nAssistant:");
        model_name_ = mapping_string(m, "model_name");
        model_field_ = mapping_string(m, "model_field");
        timestamp_field_ = mapping_string(m, "timestamp_field");
        if (user_delimiter_.empty() || model_delimiter_.empty()) {
            throw AdapterConfigError(source_name() + ": turn delimiters must be non-empty");
        }
    }

    std::size_t records_per_row() const override { return 2; }

    RowResult convert(std::string_view line, std::size_t line_number) const override {
        RowResult result;
        auto row = parse_row(line, result.problems);
        if (!row) return result;
        std::set<std::string> consumed;
        auto local = local_id(*row, id_field_, line_number, consumed, result.problems);
        const json* chosen = take(*row, chosen_field_, consumed);
        const json* rejected = take(*row, rejected_field_, consumed);
        if (!chosen || !chosen->is_string()) result.problems.push_back(chosen_field_ + ": missing transcript");
        if (!rejected || !rejected->is_string()) result.problems.push_back(rejected_field_ + ": missing transcript");
        if (!result.problems.empty()) return result;

        UnifiedRecord base;
        base.source = source_name();
        base.model_name = model_name_;
        if (const json* model = take(*row, model_field_, consumed); model && model->is_string()) {
            base.model_name = model->get<std::string>();
        }
        if (const json* ts = take(*row, timestamp_field_, consumed)) {
            base.timestamp = timestamp_value(*ts, *timestamp_field_, base.conversation_metadata);
        }
        pass_through(*row, consumed, base.conversation_metadata);
        std::string pair_id = source_name() + "-" + *local;
        base.conversation_metadata["pair_id"] = pair_id;

        for (auto [label, transcript] : {std::pair{"chosen", chosen}, std::pair{"rejected", rejected}}) {
            UnifiedRecord record = base;
            record.conversation_id = pair_id + "-" + label;
            record.conversation_metadata["preference"] = label;
            record.conversation = split(transcript->get_ref<const std::string&>(), label, result.problems);
            result.records.push_back(std::move(record));
        }
        validate_all(result.records, result.problems);
        if (!result.problems.empty()) result.records.clear();
        return result;
    }

private:
    std::vector<Message> split(const std::string& transcript, const char* label,
                               std::vector<std::string>& problems) const {
        std::vector<Message> out;
        std::size_t pos = 0;
        std::optional<Role> current;
        std::size_t segment_start = 0;
        bool found = false;
        auto flush = [&](std::size_t end) {
            std::string_view text = trim(std::string_view(transcript).substr(segment_start, end - segment_start));
            if (!current) {
                if (!text.empty()) problems.push_back(std::string(label) + ": text before the first turn delimiter");
                return;
            }
            if (text.empty()) return;
            Message m;
            m.index = out.size();
            m.role = *current;
            m.text = std::string(text);
            out.push_back(std::move(m));
        };
        while (pos < transcript.size()) {
            std::size_t u = transcript.find(user_delimiter_, pos);
            std::size_t a = transcript.find(model_delimiter_, pos);
            if (u == std::string::npos && a == std::string::npos) break;
            bool user_first = a == std::string::npos || (u != std::string::npos && u <= a);
            std::size_t at = user_first ? u : a;
            flush(at);
            found = true;
            current = user_first ? Role::user : Role::model;
            segment_start = at + (user_first ? user_delimiter_.size() : model_delimiter_.size());
            pos = segment_start;
        }
        if (!found) {
            problems.push_back(std::string(label) + ": no turn delimiters");
            return {};
        }
        flush(transcript.size());
        return out;
    }

    std::optional<std::string> id_field_;
    std::string chosen_field_;
    std::string rejected_field_;
    std::string user_delimiter_;
    std::string model_delimiter_;
    std::optional<std::string> model_name_;
    std::optional<std::string> model_field_;
    std::optional<std::string> timestamp_field_;
};

}  // namespace

std::unique_ptr<SourceAdapter> make_pairwise_adapter(AdapterConfig config) {
    return std::make_unique<PairwiseAdapter>(std::move(config));
}

}  // namespace sharelm::unify::detail
