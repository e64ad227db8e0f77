#pragma once

#include "sharelm/ingest/conversation_store.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sharelm::ingest {

struct ServiceLimits {
    std::size_t max_batch_records = 1000;
    std::size_t max_batch_bytes = 10 * 1024 * 1024;
};

/// Transport-neutral response: status code plus JSON body.
struct Response {
    int status = 200;
    nlohmann::ordered_json body;
};

struct ReleaseFilter {
    std::vector<std::string> sources;
    std::vector<std::string> models;
    std::optional<Timestamp> from;
    std::optional<Timestamp> to;

    bool matches(const UnifiedRecord& record) const;
};

struct ReleaseManifest {
    std::string release_id;
    std::size_t record_count = 0;
    std::map<std::string, std::size_t> per_source_counts;
    std::map<std::string, std::size_t> per_model_counts;
    std::string anonymizer_version;
    Timestamp created_at{};
};

nlohmann::ordered_json to_json(const ReleaseManifest& manifest);

/// Name used in per_model_counts for records without a model.
inline constexpr std::string_view kUnknownModel = "unknown";

struct ReleaseFiles {
    ReleaseManifest manifest;
    std::filesystem::path records_path;
    std::filesystem::path manifest_path;
};

class IngestionService {
public:
    using Clock = std::function<Timestamp()>;

    IngestionService(ConversationStore& store, ServiceLimits limits, Clock clock, std::uint64_t seed = std::random_device{}());

    /// POST /api/v1/conversations. 200 when every record was accepted, 422
    /// when some were rejected (the rest are still stored), 400 on a malformed
    /// body, 413 over the batch limits, 503 when the store is down.
    Response handle_upload(std::string_view body);

    /// POST /api/v1/removal-requests.
    Response handle_removal_request(std::string_view body);

    Response get_health() const;

    /// Writes release-YYYYMMDD.jsonl and its manifest into `destination`.
    /// Throws IoError when the directory is unwritable; nothing partial stays.
    ReleaseFiles export_release(const ReleaseFilter& filter, const std::filesystem::path& destination);

    /// Operator review of reported conversations.
    std::vector<StoredConversation> quarantined() const;
    bool approve(const std::string& conversation_id);
    bool remove(const std::string& conversation_id);

    ConversationStore& store() { return store_; }

private:
    RemovalTicket process_removal(RemovalTicket ticket);

    ConversationStore& store_;
    ServiceLimits limits_;
    Clock clock_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

/// Parses the POST /api/v1/releases/export body ({} for no filter).
ReleaseFilter release_filter_from_json(const nlohmann::json& value);

}  // namespace sharelm::ingest
