#include "sharelm/ingest/service.hpp"

#include "sharelm/anonymizer/anonymizer.hpp"
#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"
#include "sharelm/uuid.hpp"

#include <algorithm>
#include <set>
#include <system_error>

namespace sharelm::ingest {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Response error_response(int status, std::string message) {
    ordered_json body;
    body["error"] = std::move(message);
    return {status, std::move(body)};
}

Response unavailable(const StoreUnavailable& e) {
    return error_response(503, std::string("store unavailable: ") + e.what());
}

bool contains(const std::vector<std::string>& values, const std::string& value) {
    return std::find(values.begin(), values.end(), value) != values.end();
}

ordered_json ticket_body(const RemovalTicket& ticket) {
    ordered_json body;
    body["request_id"] = ticket.request_id;
    body["kind"] = to_string(ticket.kind);
    body["state"] = to_string(ticket.state);
    body["removed"] = ticket.removed;
    body["quarantined"] = ticket.quarantined;
    body["not_found"] = ticket.not_found;
    return body;
}

std::string release_date(Timestamp ts) {
    // YYYY-MM-DDTHH:MM:SSZ -> YYYYMMDD
    std::string text = format_rfc3339(ts);
    return text.substr(0, 4) + text.substr(5, 2) + text.substr(8, 2);
}

}  // namespace

bool ReleaseFilter::matches(const UnifiedRecord& record) const {
    if (!sources.empty() && !contains(sources, record.source)) return false;
    if (!models.empty() && (!record.model_name || !contains(models, *record.model_name))) return false;
    if ((from || to) && !record.timestamp) return false;
    if (from && *record.timestamp < *from) return false;
    if (to && *record.timestamp > *to) return false;
    return true;
}

ReleaseFilter release_filter_from_json(const json& value) {
    if (value.is_null()) return {};
    if (!value.is_object()) throw ParseError(0, "filter: expected object");
    ReleaseFilter filter;
    auto strings = [&](const char* key, std::vector<std::string>& out) {
        if (!value.contains(key) || value[key].is_null()) return;
        if (!value[key].is_array()) throw ParseError(0, std::string("filter.") + key + ": expected array");
        for (const auto& item : value[key]) {
            if (!item.is_string()) throw ParseError(0, std::string("filter.") + key + ": expected strings");
            out.push_back(item.get<std::string>());
        }
    };
    auto instant = [&](const char* key, std::optional<Timestamp>& out) {
        if (!value.contains(key) || value[key].is_null()) return;
        if (!value[key].is_string()) throw ParseError(0, std::string("filter.") + key + ": expected string");
        out = parse_rfc3339(value[key].get<std::string>());
        if (!out) throw ParseError(0, std::string("filter.") + key + ": expected RFC 3339 UTC instant");
    };
    for (const auto& [key, _] : value.items()) {
        if (key != "sources" && key != "models" && key != "from" && key != "to") {
            throw ParseError(0, "filter: unknown key " + key);
        }
    }
    strings("sources", filter.sources);
    strings("models", filter.models);
    instant("from", filter.from);
    instant("to", filter.to);
    return filter;
}

ordered_json to_json(const ReleaseManifest& manifest) {
    ordered_json j;
    j["release_id"] = manifest.release_id;
    j["record_count"] = manifest.record_count;
    j["per_source_counts"] = ordered_json::object();
    for (const auto& [k, v] : manifest.per_source_counts) j["per_source_counts"][k] = v;
    j["per_model_counts"] = ordered_json::object();
    for (const auto& [k, v] : manifest.per_model_counts) j["per_model_counts"][k] = v;
    j["anonymizer_version"] = manifest.anonymizer_version;
    j["created_at"] = format_rfc3339(manifest.created_at);
    return j;
}

IngestionService::IngestionService(ConversationStore& store, ServiceLimits limits, Clock clock, std::uint64_t seed)
    : store_(store), limits_(limits), clock_(std::move(clock)), rng_(seed) {}

Response IngestionService::handle_upload(std::string_view body) {
    if (body.size() > limits_.max_batch_bytes) {
        return error_response(413, "batch exceeds " + std::to_string(limits_.max_batch_bytes) + " bytes");
    }
    json batch;
    try {
        batch = json::parse(body);
    } catch (const json::parse_error& e) {
        ordered_json err;
        err["error"] = "malformed JSON";
        err["offset"] = e.byte;
        return {400, err};
    }
    if (!batch.is_object()) return error_response(400, "batch: expected object");
    for (const auto& [key, _] : batch.items()) {
        if (key != "user_id" && key != "profile_snapshot" && key != "records") {
            return error_response(400, "batch: unknown key " + key);
        }
    }
    if (!batch.contains("user_id") || !batch["user_id"].is_string() || batch["user_id"].get<std::string>().empty()) {
        return error_response(400, "batch.user_id: expected non-empty string");
    }
    if (batch.contains("profile_snapshot") && !batch["profile_snapshot"].is_null()) {
        try {
            string_map_from_json(batch["profile_snapshot"], "profile_snapshot");
        } catch (const ParseError& e) {
            return error_response(400, e.reason());
        }
    }
    if (!batch.contains("records") || !batch["records"].is_array()) {
        return error_response(400, "batch.records: expected array");
    }
    const auto& records = batch["records"];
    if (records.size() > limits_.max_batch_records) {
        return error_response(413, "batch exceeds " + std::to_string(limits_.max_batch_records) + " records");
    }
    const std::string user_id = batch["user_id"].get<std::string>();

    ordered_json accepted = ordered_json::array();
    ordered_json rejected = ordered_json::array();
    std::set<std::string> accepted_ids;
    try {
        for (const auto& value : records) {
            std::vector<std::string> violations;
            std::optional<UnifiedRecord> record;
            try {
                record = record_from_json(value);
            } catch (const ParseError& e) {
                violations.push_back(e.reason());
            }
            if (record) {
                if (record->user_id && *record->user_id != user_id) {
                    violations.push_back("user_id: batch-mismatch");
                }
                record->user_id = user_id;
                for (const auto& v : validate_record(*record).violations) {
                    violations.push_back(v.summary());
                }
            }
            if (!violations.empty()) {
                ordered_json entry;
                if (record && !record->conversation_id.empty()) {
                    entry["conversation_id"] = record->conversation_id;
                } else if (value.is_object() && value.contains("conversation_id") &&
                           value["conversation_id"].is_string()) {
                    entry["conversation_id"] = value["conversation_id"];
                } else {
                    entry["conversation_id"] = nullptr;
                }
                entry["violations"] = violations;
                rejected.push_back(std::move(entry));
                continue;
            }
            UnifiedRecord scrubbed = anon::scrub_record(*record);
            scrubbed.conversation_metadata[std::string(anon::kAnonymizerVersionKey)] = std::string(anon::kAnonymizerVersion);
            StoredConversation row;
            row.conversation_id = scrubbed.conversation_id;
            row.user_id = user_id;
            row.received_at = clock_();
            row.status = StoredStatus::active;
            row.record = std::move(scrubbed);
            store_.insert_if_absent(row);
            if (accepted_ids.insert(row.conversation_id).second) {
                accepted.push_back(row.conversation_id);
            }
        }
    } catch (const StoreUnavailable& e) {
        return unavailable(e);
    }
    ordered_json ack;
    ack["accepted"] = std::move(accepted);
    ack["rejected"] = std::move(rejected);
    int status = ack["rejected"].empty() ? 200 : 422;
    return {status, std::move(ack)};
}

Response IngestionService::handle_removal_request(std::string_view body) {
    json request;
    try {
        request = json::parse(body);
    } catch (const json::parse_error& e) {
        ordered_json err;
        err["error"] = "malformed JSON";
        err["offset"] = e.byte;
        return {400, err};
    }
    if (!request.is_object()) return error_response(400, "request: expected object");
    RemovalTicket ticket;
    for (const auto& [key, value] : request.items()) {
        if (key == "kind") {
            if (value == "self_removal") {
                ticket.kind = RequestKind::self_removal;
            } else if (value == "report") {
                ticket.kind = RequestKind::report;
            } else {
                return error_response(400, "kind: expected \"self_removal\" or \"report\"");
            }
        } else if (key == "claimed_user_id") {
            if (value.is_null()) continue;
            if (!value.is_string() || value.get<std::string>().empty()) {
                return error_response(400, "claimed_user_id: expected non-empty string");
            }
            ticket.claimed_user_id = value.get<std::string>();
        } else if (key == "target_conversation_ids") {
            if (value.is_null()) continue;
            if (!value.is_array()) return error_response(400, "target_conversation_ids: expected array");
            std::vector<std::string> targets;
            for (const auto& id : value) {
                if (!id.is_string()) return error_response(400, "target_conversation_ids: expected strings");
                if (!contains(targets, id.get<std::string>())) targets.push_back(id.get<std::string>());
            }
            ticket.target_conversation_ids = std::move(targets);
        } else if (key == "reason") {
            if (!value.is_string()) return error_response(400, "reason: expected string");
            ticket.reason = value.get<std::string>();
        } else {
            return error_response(400, "request: unknown key " + key);
        }
    }
    if (!request.contains("kind")) return error_response(400, "kind: required");
    if (ticket.kind == RequestKind::self_removal && !ticket.claimed_user_id) {
        return error_response(400, "claimed_user_id: required for self_removal");
    }
    if (ticket.kind == RequestKind::report &&
        (!ticket.target_conversation_ids || ticket.target_conversation_ids->empty())) {
        return error_response(400, "target_conversation_ids: required for report");
    }
    {
        std::lock_guard lock(rng_mutex_);
        ticket.request_id = make_uuid(rng_);
    }
    ticket.created_at = clock_();
    try {
        ticket = process_removal(std::move(ticket));
        store_.save_ticket(ticket);
    } catch (const StoreUnavailable& e) {
        return unavailable(e);
    }
    bool all_unknown = ticket.target_conversation_ids && !ticket.target_conversation_ids->empty() &&
                       ticket.not_found.size() == ticket.target_conversation_ids->size();
    return {all_unknown ? 404 : 200, ticket_body(ticket)};
}

RemovalTicket IngestionService::process_removal(RemovalTicket ticket) {
    if (ticket.kind == RequestKind::report) {
        for (const auto& id : *ticket.target_conversation_ids) {
            auto row = store_.get(id);
            if (!row || row->status == StoredStatus::removed) {
                ticket.not_found.push_back(id);
                continue;
            }
            if (row->status == StoredStatus::active) {
                store_.set_status(id, StoredStatus::quarantined);
            }
            ticket.quarantined.push_back(id);
        }
        ticket.state = ticket.quarantined.empty() ? RequestState::rejected : RequestState::verified;
        return ticket;
    }

    const std::string& user = *ticket.claimed_user_id;
    std::vector<std::string> to_remove;
    if (!ticket.target_conversation_ids) {
        auto owned = store_.ids_for_user(user, {StoredStatus::active, StoredStatus::quarantined, StoredStatus::removed});
        if (owned.empty()) {
            ticket.state = RequestState::rejected;
            return ticket;
        }
        to_remove = store_.ids_for_user(user, {StoredStatus::active, StoredStatus::quarantined});
    } else {
        bool mismatch = false;
        for (const auto& id : *ticket.target_conversation_ids) {
            auto row = store_.get(id);
            if (!row) {
                ticket.not_found.push_back(id);
            } else if (row->user_id != user) {
                mismatch = true;
            } else {
                to_remove.push_back(id);
            }
        }
        if (mismatch || to_remove.empty()) {
            ticket.state = RequestState::rejected;
            return ticket;
        }
    }
    for (const auto& id : to_remove) {
        store_.set_status(id, StoredStatus::removed);
        ticket.removed.push_back(id);
    }
    ticket.state = RequestState::executed;
    return ticket;
}

Response IngestionService::get_health() const {
    ordered_json body;
    bool up = store_.healthy();
    std::optional<std::size_t> records;
    if (up) {
        try {
            records = store_.count(StoredStatus::active) + store_.count(StoredStatus::quarantined);
        } catch (const StoreUnavailable&) {
            up = false;
        }
    }
    body["status"] = up ? "ok" : "degraded";
    body["store"] = up ? "reachable" : "unreachable";
    body["record_count"] = records ? ordered_json(*records) : ordered_json(nullptr);
    body["anonymizer_version"] = anon::kAnonymizerVersion;
    return {up ? 200 : 503, std::move(body)};
}

ReleaseFiles IngestionService::export_release(const ReleaseFilter& filter, const std::filesystem::path& destination) {
    ReleaseFiles files;
    ReleaseManifest& manifest = files.manifest;
    manifest.created_at = clock_();
    manifest.release_id = "release-" + release_date(manifest.created_at);
    manifest.anonymizer_version = std::string(anon::kAnonymizerVersion);

    std::string lines;
    store_.for_each(StoredStatus::active, [&](const StoredConversation& row) {
        if (!row.record || !filter.matches(*row.record) || !validate_record(*row.record).valid()) {
            return;
        }
        lines += serialize_record(*row.record);
        lines += '\n';
        ++manifest.record_count;
        ++manifest.per_source_counts[row.record->source];
        ++manifest.per_model_counts[row.record->model_name.value_or(std::string(kUnknownModel))];
    });

    std::error_code ec;
    std::filesystem::create_directories(destination, ec);
    if (ec) {
        throw IoError("cannot create " + destination.string() + ": " + ec.message());
    }
    files.records_path = destination / (manifest.release_id + ".jsonl");
    files.manifest_path = destination / (manifest.release_id + ".manifest.json");
    write_file_atomically(files.records_path, lines);
    try {
        write_file_atomically(files.manifest_path, to_json(manifest).dump(2) + "\n");
    } catch (...) {
        std::filesystem::remove(files.records_path, ec);
        throw;
    }
    return files;
}

std::vector<StoredConversation> IngestionService::quarantined() const {
    std::vector<StoredConversation> out;
    store_.for_each(StoredStatus::quarantined, [&](const StoredConversation& row) { out.push_back(row); });
    return out;
}

bool IngestionService::approve(const std::string& conversation_id) {
    auto row = store_.get(conversation_id);
    if (!row || row->status != StoredStatus::quarantined) return false;
    store_.set_status(conversation_id, StoredStatus::active);
    return true;
}

bool IngestionService::remove(const std::string& conversation_id) {
    auto row = store_.get(conversation_id);
    if (!row || row->status == StoredStatus::removed) return false;
    store_.set_status(conversation_id, StoredStatus::removed);
    return true;
}

}  // namespace sharelm::ingest
