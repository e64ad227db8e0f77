#include "sharelm/record.hpp"

#include <algorithm>

namespace sharelm {

std::string_view to_string(Role role) {
    return role == Role::user ? "user" : "model";
}

std::string_view to_string(Rating rating) {
    return rating == Rating::thumbs_up ? "thumbs_up" : "thumbs_down";
}

std::optional<Role> parse_role(std::string_view text) {
    if (text == "user") {
        return Role::user;
    }
    if (text == "model") {
        return Role::model;
    }
    return std::nullopt;
}

std::optional<Rating> parse_rating(std::string_view text) {
    if (text == "thumbs_up") {
        return Rating::thumbs_up;
    }
    if (text == "thumbs_down") {
        return Rating::thumbs_down;
    }
    return std::nullopt;
}

std::string Violation::summary() const {
    return field_path + ": " + rule;
}

bool ValidationReport::has(std::string_view field_path, std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
        return v.field_path == field_path && v.rule == rule;
    });
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(text[i]);
        std::size_t extra;
        char32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= n) {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) {
                return false;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates and out-of-range code points.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += extra + 1;
    }
    return true;
}

bool has_visible_text(std::string_view text) {
    return std::any_of(text.begin(), text.end(), [](char c) {
        return !(c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v');
    });
}

namespace {

class Checker {
public:
    void add(std::string path, std::string rule, std::string detail) {
        report.violations.push_back({std::move(path), std::move(rule), std::move(detail)});
    }

    void utf8(const std::string& path, std::string_view value) {
        if (!is_valid_utf8(value)) {
            add(path, "utf8", "value is not valid UTF-8");
        }
    }

    void map(const std::string& path, const StringMap& values) {
        for (const auto& [key, value] : values) {
            if (key.empty()) {
                add(path, "non-empty-key", "map keys must be non-empty");
            }
            utf8(path + "." + key, key);
            utf8(path + "." + key, value);
        }
    }

    ValidationReport report;
};

}  // namespace

ValidationReport validate_record(const UnifiedRecord& record) {
    Checker check;

    if (record.conversation_id.empty()) {
        check.add("conversation_id", "required", "conversation_id is missing");
    }
    check.utf8("conversation_id", record.conversation_id);

    if (record.conversation.empty()) {
        check.add("conversation", "non-empty", "conversation must contain at least one message");
    }
    for (std::size_t i = 0; i < record.conversation.size(); ++i) {
        const Message& m = record.conversation[i];
        const std::string base = "conversation[" + std::to_string(i) + "]";
        if (m.index != i) {
            check.add(base + ".index", "contiguous",
                      "expected index " + std::to_string(i) + ", found " + std::to_string(m.index));
        }
        if (!has_visible_text(m.text)) {
            check.add(base + ".text", "non-blank", "message text is empty after trimming");
        }
        check.utf8(base + ".text", m.text);
        if (m.response_rating && m.role != Role::model) {
            check.add(base + ".response_rating", "model-only",
                      "only model responses can carry a response rating");
        }
    }

    if (record.model_name) {
        if (record.model_name->empty()) {
            check.add("model_name", "non-empty", "model_name is present but empty");
        }
        check.utf8("model_name", *record.model_name);
    }
    if (record.user_id) {
        if (record.user_id->empty()) {
            check.add("user_id", "non-empty", "user_id is present but empty");
        }
        check.utf8("user_id", *record.user_id);
    }
    if (record.timestamp && !is_rfc3339_representable(*record.timestamp)) {
        check.add("timestamp", "rfc3339-range", "timestamp year outside 0000-9999");
    }
    if (record.source.empty()) {
        check.add("source", "required", "source is missing");
    }
    check.utf8("source", record.source);

    check.map("user_metadata", record.user_metadata);
    check.map("conversation_metadata", record.conversation_metadata);
    if (auto it = record.conversation_metadata.find(std::string(kConversationRatingKey));
        it != record.conversation_metadata.end() && !parse_rating(it->second)) {
        check.add("conversation_metadata.conversation_rating", "rating-value",
                  "conversation_rating must be thumbs_up or thumbs_down");
    }
    return std::move(check.report);
}

}  // namespace sharelm
