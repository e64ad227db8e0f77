#include "sharelm/anonymizer/anonymizer.hpp"

namespace sharelm::anon {

std::string_view to_string(EntityKind kind) {
    switch (kind) {
    case EntityKind::email:
        return "email";
    case EntityKind::phone:
        return "phone";
    case EntityKind::url_with_userinfo:
        return "url_with_userinfo";
    case EntityKind::ip_address:
        return "ip_address";
    case EntityKind::person_name:
        return "person_name";
    case EntityKind::street_address:
        return "street_address";
    case EntityKind::id_number:
        return "id_number";
    }
    return "unknown";
}

std::string_view placeholder_tag(EntityKind kind) {
    switch (kind) {
    case EntityKind::email:
        return "EMAIL";
    case EntityKind::phone:
        return "PHONE";
    case EntityKind::url_with_userinfo:
        return "URL";
    case EntityKind::ip_address:
        return "IP";
    case EntityKind::person_name:
        return "NAME";
    case EntityKind::street_address:
        return "ADDRESS";
    case EntityKind::id_number:
        return "ID";
    }
    return "ENTITY";
}

const std::string& PlaceholderRegistry::placeholder_for(EntityKind kind, std::string_view surface) {
    auto key = std::make_pair(kind, std::string(surface));
    auto it = assigned_.find(key);
    if (it != assigned_.end()) {
        return it->second;
    }
    std::size_t number = ++counters_[kind];
    std::string placeholder = "[" + std::string(placeholder_tag(kind)) + "_" + std::to_string(number) + "]";
    return assigned_.emplace(std::move(key), std::move(placeholder)).first->second;
}

ScrubResult scrub_text(std::string_view text, PlaceholderRegistry& registry) {
    ScrubResult result;
    for (const auto& d : detect_entities(text)) {
        result.entities.push_back(
            {d.kind, d.start, d.end, registry.placeholder_for(d.kind, text.substr(d.start, d.end - d.start))});
    }
    result.scrubbed_text = apply_spans(text, result.entities);
    return result;
}

ScrubResult scrub_text(std::string_view text) {
    PlaceholderRegistry registry;
    return scrub_text(text, registry);
}

std::string apply_spans(std::string_view original, const std::vector<EntitySpan>& spans) {
    std::string out;
    out.reserve(original.size());
    std::size_t cursor = 0;
    for (const auto& span : spans) {
        out.append(original.substr(cursor, span.start - cursor));
        out.append(span.placeholder);
        cursor = span.end;
    }
    out.append(original.substr(cursor));
    return out;
}

UnifiedRecord scrub_record(const UnifiedRecord& record) {
    UnifiedRecord out = record;
    PlaceholderRegistry registry;
    for (auto& message : out.conversation) {
        message.text = scrub_text(message.text, registry).scrubbed_text;
    }
    return out;
}

}  // namespace sharelm::anon
