#pragma once

#include "sharelm/record.hpp"
#include "sharelm/time.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharelm::capture {

/// One rendered turn as seen on the page.
struct Turn {
    Role role = Role::user;
    std::string text;
    std::optional<Rating> response_rating;

    friend bool operator==(const Turn&, const Turn&) = default;
};

/// The full rendered transcript at poll time, never a delta.
struct Snapshot {
    std::string url;
    std::vector<Turn> turns;
    std::chrono::steady_clock::time_point observed_at{};
};

enum class ConversationState { recording, pending_upload, published, deleted };

std::string_view to_string(ConversationState state);
std::optional<ConversationState> parse_conversation_state(std::string_view text);

struct ConversationFeedback {
    std::optional<Rating> conversation_rating;

    friend bool operator==(const ConversationFeedback&, const ConversationFeedback&) = default;
};

/// Salted digest of a (role, text) pair. Lets the store recognise page
/// content it has already captured or suppressed without keeping the text.
using TurnDigest = std::uint64_t;

struct CapturedConversation {
    std::string id;
    std::vector<Message> messages;
    std::string url;
    std::optional<std::string> model_hint;
    Timestamp created_at{};
    Timestamp updated_at{};
    ConversationState state = ConversationState::recording;
    ConversationFeedback feedback;
    /// Digests of the page turns rendered before messages[0]; they belong to
    /// earlier (possibly deleted) conversations on the same page.
    std::vector<TurnDigest> page_prefix;
    /// Handed to the transport and awaiting acknowledgement.
    bool in_flight = false;

    friend bool operator==(const CapturedConversation&, const CapturedConversation&) = default;
};

struct UserProfile {
    std::string user_id;
    std::optional<int> age;
    std::optional<std::string> country;
    std::optional<std::string> gender;

    /// Present fields only, keyed "age", "country", "gender".
    StringMap demographics() const;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

enum class Boundary { new_conversation, continuation, no_change };

std::string_view to_string(Boundary boundary);

/// Classifies a snapshot against the active conversation. The active
/// conversation's page transcript is its page_prefix followed by its messages;
/// comparison is on (role, text) only.
Boundary detect_boundary(const CapturedConversation* active, const Snapshot& snap, TurnDigest salt = 0);

TurnDigest digest_turn(Role role, std::string_view text, TurnDigest salt);

enum class EventKind { opened, appended, finalized, rating_merged };

std::string_view to_string(EventKind kind);

struct StoreEvent {
    EventKind kind;
    std::string conversation_id;
    /// Messages appended or ratings merged; 0 for opened/finalized.
    std::size_t count = 0;

    friend bool operator==(const StoreEvent&, const StoreEvent&) = default;
};

struct UploadBatch {
    std::vector<UnifiedRecord> records;
    std::string user_id;
    StringMap profile_snapshot;

    std::vector<std::string> conversation_ids() const;
};

nlohmann::ordered_json to_json(const UploadBatch& batch);
/// Throws ParseError on schema problems; records go through record_from_json.
UploadBatch upload_batch_from_json(const nlohmann::json& value);

class CaptureError : public std::runtime_error {
public:
    enum class Code { terms_not_accepted, unknown_conversation, already_published, index_out_of_range, not_a_model_response };

    CaptureError(Code code, const std::string& message);

    Code code() const noexcept { return code_; }

private:
    Code code_;
};

std::string_view to_string(CaptureError::Code code);

/// Best-effort model name from a chat page URL (Spaces path, chat-ui model
/// path, *.hf.space host, or a "model" query parameter).
std::optional<std::string> model_hint_from_url(std::string_view url);

inline constexpr Seconds kDefaultIdleThreshold{30 * 60};

/// Client-side local database and capture state machine.
///
/// Conversations move recording -> pending_upload -> published, or to deleted
/// from any non-published state. Published conversations leave the store once
/// the transport acknowledges them. All mutators take the current time
/// explicitly; nothing reads the ambient clock.
///
/// Single writer: callers serialize all mutating calls.
class LocalStore {
public:
    struct PageTrail {
        std::vector<TurnDigest> turns;
        Timestamp last_seen{};

        friend bool operator==(const PageTrail&, const PageTrail&) = default;
    };

    /// What remains of a deleted conversation: when it may be forgotten and
    /// digests of the page turns it covered, so they are never recaptured.
    struct Tombstone {
        Timestamp expires_at{};
        std::string url;
        std::vector<TurnDigest> page_turns;

        friend bool operator==(const Tombstone&, const Tombstone&) = default;
    };

    /// Fresh store: random user id, terms not accepted, sharing enabled.
    static LocalStore init(Timestamp now);
    static LocalStore init(Timestamp now, std::uint64_t seed);

    void accept_terms();
    bool terms_accepted() const noexcept { return terms_accepted_; }

    void set_sharing(bool enabled);
    bool sharing_enabled() const noexcept { return sharing_enabled_; }

    const UserProfile& profile() const noexcept { return profile_; }
    void set_demographics(std::optional<int> age, std::optional<std::string> country,
                          std::optional<std::string> gender);

    /// Applies one polled snapshot. No-op while sharing is paused.
    std::vector<StoreEvent> observe(const Snapshot& snap, Timestamp now);

    /// Recording conversations idle for longer than `threshold` become pending.
    std::vector<std::string> finalize_idle(Timestamp now, Seconds threshold = kDefaultIdleThreshold);

    void rate_conversation(const std::string& id, Rating rating);
    void rate_response(const std::string& id, std::size_t message_index, Rating rating);

    /// Erases content immediately; the id survives as a tombstone until the
    /// conversation's upload window would have elapsed.
    void delete_conversation(const std::string& id);

    /// Pending conversations at least 24 hours old, marked in flight.
    UploadBatch collect_due_batch(Timestamp now);

    /// Finalizes recording conversations, then batches everything pending
    /// regardless of age.
    UploadBatch publish_now(Timestamp now);

    /// Transport confirmed receipt: conversations become published and leave the store.
    void acknowledge(const UploadBatch& batch);
    /// Transport failed: conversations return to pending_upload.
    void abandon(const UploadBatch& batch);

    /// Drops tombstones whose upload window has elapsed and caps the number of
    /// remembered pages at kMaxPageTrails.
    void purge_expired(Timestamp now);

    static constexpr std::size_t kMaxPageTrails = 256;

    const std::map<std::string, CapturedConversation>& conversations() const noexcept {
        return conversations_;
    }
    const CapturedConversation* find(const std::string& id) const;
    const CapturedConversation* active() const;
    /// Conversations not yet published or deleted, oldest first.
    std::vector<const CapturedConversation*> visible_conversations() const;
    const std::map<std::string, Tombstone>& tombstones() const noexcept { return tombstones_; }

    nlohmann::ordered_json to_json() const;
    static LocalStore from_json(const nlohmann::json& value);

    void save(const std::filesystem::path& path) const;
    static LocalStore load(const std::filesystem::path& path);

    UnifiedRecord to_record(const CapturedConversation& conversation) const;

private:
    LocalStore() = default;

    CapturedConversation& require(const std::string& id);
    CapturedConversation& require_mutable(const std::string& id);
    void finalize(CapturedConversation& conversation, Timestamp now);
    std::vector<StoreEvent> open_conversation(const Snapshot& snap, std::size_t turn_count, Timestamp now);
    std::size_t merge_ratings(CapturedConversation& conversation, const Snapshot& snap);
    std::vector<TurnDigest> digests(const Snapshot& snap, std::size_t turn_count) const;
    UploadBatch make_batch(const std::vector<std::string>& ids);

    std::map<std::string, CapturedConversation> conversations_;
    std::map<std::string, Tombstone> tombstones_;
    std::map<std::string, PageTrail> trails_;
    std::optional<std::string> active_id_;
    bool sharing_enabled_ = true;
    bool terms_accepted_ = false;
    UserProfile profile_;
    TurnDigest salt_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace sharelm::capture
