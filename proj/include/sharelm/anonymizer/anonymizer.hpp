#pragma once

#include "sharelm/record.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sharelm::anon {

/// Recorded in conversation_metadata["anonymizer_version"] of stored records.
inline constexpr std::string_view kAnonymizerVersion = "sharelm-anonymizer/1.0";
inline constexpr std::string_view kAnonymizerVersionKey = "anonymizer_version";

enum class EntityKind { email, phone, url_with_userinfo, ip_address, person_name, street_address, id_number };

std::string_view to_string(EntityKind kind);

/// Placeholder tag for a kind, e.g. "EMAIL" in "[EMAIL_1]".
std::string_view placeholder_tag(EntityKind kind);

/// A detected entity. Offsets are byte positions in the original text.
struct EntitySpan {
    EntityKind kind;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string placeholder;

    friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct ScrubResult {
    std::string scrubbed_text;
    std::vector<EntitySpan> entities;
};

/// Per-conversation placeholder numbering. Numbers are per kind and assigned
/// in first-occurrence order; the same surface string always maps to the
/// same placeholder.
class PlaceholderRegistry {
public:
    const std::string& placeholder_for(EntityKind kind, std::string_view surface);

    std::size_t size() const noexcept { return assigned_.size(); }

private:
    std::map<std::pair<EntityKind, std::string>, std::string> assigned_;
    std::map<EntityKind, std::size_t> counters_;
};

/// Raw detector output before placeholders are assigned.
struct Detection {
    EntityKind kind;
    std::size_t start = 0;
    std::size_t end = 0;
};

/// Runs every detector and resolves overlaps. Higher-priority kinds claim
/// their spans first (url, email, ip, phone, id number, address, name);
/// within a kind, earlier and then longer spans win. Result is sorted by start
/// and non-overlapping.
std::vector<Detection> detect_entities(std::string_view text);

ScrubResult scrub_text(std::string_view text, PlaceholderRegistry& registry);

/// Convenience overload with a throwaway registry.
ScrubResult scrub_text(std::string_view text);

/// Scrubs every message text with one shared registry. Other fields are
/// untouched.
UnifiedRecord scrub_record(const UnifiedRecord& record);

/// Substitutes each span's placeholder into `original`.
std::string apply_spans(std::string_view original, const std::vector<EntitySpan>& spans);

bool is_dictionary_name(std::string_view word);
bool is_ambiguous_name(std::string_view word);
std::size_t dictionary_size();

}  // namespace sharelm::anon
