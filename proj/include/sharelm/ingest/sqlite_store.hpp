#pragma once

#include "sharelm/ingest/conversation_store.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

struct sqlite3;

namespace sharelm::ingest {

/// Embedded relational store. ":memory:" gives a private in-memory database.
/// One connection guarded by a mutex; removed content is overwritten on disk
/// (secure_delete).
class SqliteConversationStore final : public ConversationStore {
public:
    explicit SqliteConversationStore(const std::string& path);
    ~SqliteConversationStore() override;

    SqliteConversationStore(const SqliteConversationStore&) = delete;
    SqliteConversationStore& operator=(const SqliteConversationStore&) = delete;

    bool healthy() const override;
    bool insert_if_absent(const StoredConversation& row) override;
    std::optional<StoredConversation> get(const std::string& conversation_id) const override;
    std::vector<std::string> ids_for_user(const std::string& user_id,
                                          const std::vector<StoredStatus>& statuses) const override;
    void set_status(const std::string& conversation_id, StoredStatus status) override;
    std::size_t count(std::optional<StoredStatus> status) const override;
    void for_each(StoredStatus status, const std::function<void(const StoredConversation&)>& visit) const override;
    void save_ticket(const RemovalTicket& ticket) override;

    /// Removal tickets as stored, oldest first (JSON text per ticket).
    std::vector<std::string> ticket_log() const;

private:
    void exec(const char* sql) const;

    sqlite3* db_ = nullptr;
    mutable std::mutex mutex_;
};

}  // namespace sharelm::ingest
