#pragma once

#include "sharelm/record.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharelm::ingest {

enum class StoredStatus { active, quarantined, removed };

std::string_view to_string(StoredStatus status);
std::optional<StoredStatus> parse_stored_status(std::string_view text);

/// One row per conversation_id. Removed rows keep id and status only.
struct StoredConversation {
    std::string conversation_id;
    std::optional<UnifiedRecord> record;
    std::optional<std::string> user_id;
    Timestamp received_at{};
    StoredStatus status = StoredStatus::active;
};

enum class RequestKind { self_removal, report };
enum class RequestState { received, verified, rejected, executed };

std::string_view to_string(RequestKind kind);
std::string_view to_string(RequestState state);

struct RemovalTicket {
    std::string request_id;
    RequestKind kind = RequestKind::self_removal;
    std::optional<std::string> claimed_user_id;
    std::optional<std::vector<std::string>> target_conversation_ids;
    std::string reason;
    RequestState state = RequestState::received;
    std::vector<std::string> removed;
    std::vector<std::string> quarantined;
    std::vector<std::string> not_found;
    Timestamp created_at{};
};

/// Raised when the backing store cannot be reached; surfaces as HTTP 503.
class StoreUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Durable conversation storage. Implementations make each call atomic and
/// linearize operations on the same conversation_id.
class ConversationStore {
public:
    virtual ~ConversationStore() = default;

    virtual bool healthy() const = 0;

    /// Inserts unless the id already exists. Returns true when inserted.
    virtual bool insert_if_absent(const StoredConversation& row) = 0;

    virtual std::optional<StoredConversation> get(const std::string& conversation_id) const = 0;

    /// Ids whose stored user_id matches, restricted to the given statuses.
    virtual std::vector<std::string> ids_for_user(const std::string& user_id,
                                                  const std::vector<StoredStatus>& statuses) const = 0;

    /// Changes status; moving to `removed` erases the content in the same step.
    virtual void set_status(const std::string& conversation_id, StoredStatus status) = 0;

    virtual std::size_t count(std::optional<StoredStatus> status = std::nullopt) const = 0;

    /// Visits rows with the given status in conversation_id order, all from
    /// one consistent snapshot.
    virtual void for_each(StoredStatus status, const std::function<void(const StoredConversation&)>& visit) const = 0;

    virtual void save_ticket(const RemovalTicket& ticket) = 0;
};

}  // namespace sharelm::ingest
