#include "sharelm/ingest/sqlite_store.hpp"

#include "sharelm/json_codec.hpp"

#include <sqlite3.h>

#include <nlohmann/json.hpp>

namespace sharelm::ingest {

namespace {

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
            throw StoreUnavailable(std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }

    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int index, std::string_view text) {
        check(sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int index, long long value) {
        check(sqlite3_bind_int64(stmt_, index, value));
        return *this;
    }
    Statement& bind_null(int index) {
        check(sqlite3_bind_null(stmt_, index));
        return *this;
    }
    Statement& bind(int index, const std::optional<std::string>& text) {
        return text ? bind(index, std::string_view(*text)) : bind_null(index);
    }

    /// True while a row is available.
    bool step() {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StoreUnavailable(std::string("step failed: ") + sqlite3_errmsg(db_));
    }

    std::optional<std::string> text(int column) const {
        if (sqlite3_column_type(stmt_, column) == SQLITE_NULL) return std::nullopt;
        auto* data = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, column));
        return std::string(data, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, column)));
    }
    long long integer(int column) const { return sqlite3_column_int64(stmt_, column); }

private:
    void check(int rc) {
        if (rc != SQLITE_OK) throw StoreUnavailable(std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

StoredConversation read_row(const Statement& s) {
    StoredConversation row;
    row.conversation_id = *s.text(0);
    row.user_id = s.text(1);
    if (auto record = s.text(2)) {
        row.record = parse_record(*record);
    }
    row.received_at = from_unix_seconds(s.integer(3));
    row.status = parse_stored_status(*s.text(4)).value_or(StoredStatus::active);
    return row;
}

constexpr const char* kSelectColumns = "SELECT conversation_id, user_id, record, received_at, status FROM conversations";

nlohmann::ordered_json ticket_json(const RemovalTicket& t) {
    nlohmann::ordered_json j;
    j["request_id"] = t.request_id;
    j["kind"] = to_string(t.kind);
    j["claimed_user_id"] = t.claimed_user_id ? nlohmann::ordered_json(*t.claimed_user_id) : nlohmann::ordered_json(nullptr);
    j["target_conversation_ids"] =
        t.target_conversation_ids ? nlohmann::ordered_json(*t.target_conversation_ids) : nlohmann::ordered_json(nullptr);
    j["reason"] = t.reason;
    j["state"] = to_string(t.state);
    j["removed"] = t.removed;
    j["quarantined"] = t.quarantined;
    j["not_found"] = t.not_found;
    j["created_at"] = format_rfc3339(t.created_at);
    return j;
}

}  // namespace

SqliteConversationStore::SqliteConversationStore(const std::string& path) {
    int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
        std::string message = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        throw StoreUnavailable("cannot open store " + path + ": " + message);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA secure_delete = ON");
    exec("PRAGMA foreign_keys = ON");
    if (path != ":memory:") {
        exec("PRAGMA journal_mode = WAL");
    }
    exec("CREATE TABLE IF NOT EXISTS conversations ("
         " conversation_id TEXT PRIMARY KEY,"
         " user_id TEXT,"
         " record TEXT,"
         " received_at INTEGER NOT NULL,"
         " status TEXT NOT NULL CHECK (status IN ('active','quarantined','removed')))");
    exec("CREATE INDEX IF NOT EXISTS conversations_user ON conversations(user_id)");
    exec("CREATE TABLE IF NOT EXISTS removal_requests ("
         " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
         " request_id TEXT NOT NULL UNIQUE,"
         " ticket TEXT NOT NULL)");
}

SqliteConversationStore::~SqliteConversationStore() {
    sqlite3_close(db_);
}

void SqliteConversationStore::exec(const char* sql) const {
    char* error = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &error) != SQLITE_OK) {
        std::string message = error ? error : "unknown error";
        sqlite3_free(error);
        throw StoreUnavailable(message);
    }
}

bool SqliteConversationStore::healthy() const {
    std::lock_guard lock(mutex_);
    try {
        Statement s(db_, "SELECT 1");
        return s.step();
    } catch (const StoreUnavailable&) {
        return false;
    }
}

bool SqliteConversationStore::insert_if_absent(const StoredConversation& row) {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "INSERT INTO conversations (conversation_id, user_id, record, received_at, status)"
                " VALUES (?, ?, ?, ?, ?) ON CONFLICT(conversation_id) DO NOTHING");
    s.bind(1, std::string_view(row.conversation_id)).bind(2, row.user_id);
    if (row.record && row.status != StoredStatus::removed) {
        s.bind(3, std::string_view(serialize_record(*row.record)));
    } else {
        s.bind_null(3);
    }
    s.bind(4, static_cast<long long>(row.received_at.time_since_epoch().count()));
    s.bind(5, to_string(row.status));
    s.step();
    return sqlite3_changes(db_) > 0;
}

std::optional<StoredConversation> SqliteConversationStore::get(const std::string& conversation_id) const {
    std::lock_guard lock(mutex_);
    Statement s(db_, (std::string(kSelectColumns) + " WHERE conversation_id = ?").c_str());
    s.bind(1, std::string_view(conversation_id));
    if (!s.step()) return std::nullopt;
    return read_row(s);
}

std::vector<std::string> SqliteConversationStore::ids_for_user(const std::string& user_id,
                                                               const std::vector<StoredStatus>& statuses) const {
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT conversation_id, status FROM conversations WHERE user_id = ? ORDER BY conversation_id");
    s.bind(1, std::string_view(user_id));
    std::vector<std::string> out;
    while (s.step()) {
        auto status = parse_stored_status(*s.text(1));
        for (auto wanted : statuses) {
            if (status == wanted) {
                out.push_back(*s.text(0));
                break;
            }
        }
    }
    return out;
}

void SqliteConversationStore::set_status(const std::string& conversation_id, StoredStatus status) {
    std::lock_guard lock(mutex_);
    if (status == StoredStatus::removed) {
        // user_id stays so repeated removal requests still verify ownership.
        Statement s(db_, "UPDATE conversations SET status = 'removed', record = NULL WHERE conversation_id = ?");
        s.bind(1, std::string_view(conversation_id));
        s.step();
        return;
    }
    Statement s(db_, "UPDATE conversations SET status = ? WHERE conversation_id = ? AND status != 'removed'");
    s.bind(1, to_string(status)).bind(2, std::string_view(conversation_id));
    s.step();
}

std::size_t SqliteConversationStore::count(std::optional<StoredStatus> status) const {
    std::lock_guard lock(mutex_);
    if (!status) {
        Statement s(db_, "SELECT COUNT(*) FROM conversations");
        s.step();
        return static_cast<std::size_t>(s.integer(0));
    }
    Statement s(db_, "SELECT COUNT(*) FROM conversations WHERE status = ?");
    s.bind(1, to_string(*status));
    s.step();
    return static_cast<std::size_t>(s.integer(0));
}

void SqliteConversationStore::for_each(StoredStatus status,
                                       const std::function<void(const StoredConversation&)>& visit) const {
    std::lock_guard lock(mutex_);
    Statement s(db_, (std::string(kSelectColumns) + " WHERE status = ? ORDER BY conversation_id").c_str());
    s.bind(1, to_string(status));
    while (s.step()) {
        visit(read_row(s));
    }
}

void SqliteConversationStore::save_ticket(const RemovalTicket& ticket) {
    std::lock_guard lock(mutex_);
    Statement s(db_,
                "INSERT INTO removal_requests (request_id, ticket) VALUES (?, ?)"
                " ON CONFLICT(request_id) DO UPDATE SET ticket = excluded.ticket");
    s.bind(1, std::string_view(ticket.request_id)).bind(2, std::string_view(ticket_json(ticket).dump()));
    s.step();
}

std::vector<std::string> SqliteConversationStore::ticket_log() const {
    std::lock_guard lock(mutex_);
    Statement s(db_, "SELECT ticket FROM removal_requests ORDER BY seq");
    std::vector<std::string> out;
    while (s.step()) {
        out.push_back(*s.text(0));
    }
    return out;
}

}  // namespace sharelm::ingest
