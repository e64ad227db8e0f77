#pragma once

#include "generators.hpp"

#include "sharelm/ingest/service.hpp"
#include "sharelm/io.hpp"
#include "sharelm/ingest/sqlite_store.hpp"
#include "sharelm/json_codec.hpp"
#include "sharelm/uuid.hpp"

#include <atomic>

namespace sharelm::testing {

/// Delegates to an in-memory SQLite store until `down` is set.
class FlakyStore final : public ingest::ConversationStore {
public:
    std::atomic<bool> down{false};

    bool healthy() const override { return !down && inner_.healthy(); }
    bool insert_if_absent(const ingest::StoredConversation& row) override {
        check();
        return inner_.insert_if_absent(row);
    }
    std::optional<ingest::StoredConversation> get(const std::string& id) const override {
        check();
        return inner_.get(id);
    }
    std::vector<std::string> ids_for_user(const std::string& user,
                                          const std::vector<ingest::StoredStatus>& statuses) const override {
        check();
        return inner_.ids_for_user(user, statuses);
    }
    void set_status(const std::string& id, ingest::StoredStatus status) override {
        check();
        inner_.set_status(id, status);
    }
    std::size_t count(std::optional<ingest::StoredStatus> status) const override {
        check();
        return inner_.count(status);
    }
    void for_each(ingest::StoredStatus status,
                  const std::function<void(const ingest::StoredConversation&)>& visit) const override {
        check();
        inner_.for_each(status, visit);
    }
    void save_ticket(const ingest::RemovalTicket& ticket) override {
        check();
        inner_.save_ticket(ticket);
    }

private:
    void check() const {
        if (down) throw ingest::StoreUnavailable("injected outage");
    }

    ingest::SqliteConversationStore inner_{":memory:"};
};

inline const Timestamp kServiceNow = from_unix_seconds(1718236800);  // 2024-06-13T00:00:00Z

inline ingest::IngestionService::Clock fixed_clock() {
    return [] { return kServiceNow; };
}

/// Plugin-style record owned by `user` whose texts embed `tag`.
inline UnifiedRecord plugin_record(const std::string& id, const std::string& user, const std::string& tag,
                                   const std::string& model = "mistral-7b") {
    UnifiedRecord r;
    r.conversation_id = id;
    r.conversation = {{0, Role::user, "question " + tag, std::nullopt},
                      {1, Role::model, "answer " + tag, Rating::thumbs_up}};
    r.model_name = model;
    r.user_id = user;
    r.timestamp = kServiceNow - std::chrono::hours(48);
    r.source = std::string(kPluginSource);
    r.user_metadata = {{"age", "30"}};
    return r;
}

inline std::string batch_body(const std::string& user, const std::vector<UnifiedRecord>& records) {
    nlohmann::ordered_json body;
    body["user_id"] = user;
    body["profile_snapshot"] = nlohmann::ordered_json::object();
    body["records"] = nlohmann::ordered_json::array();
    for (const auto& r : records) body["records"].push_back(record_to_json(r));
    return body.dump();
}

}  // namespace sharelm::testing
