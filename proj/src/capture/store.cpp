#include "sharelm/capture/store.hpp"

#include "sharelm/io.hpp"
#include "sharelm/json_codec.hpp"
#include "sharelm/uuid.hpp"

#include <algorithm>
#include <sstream>

namespace sharelm::capture {

std::string_view to_string(ConversationState state) {
    switch (state) {
    case ConversationState::recording:
        return "recording";
    case ConversationState::pending_upload:
        return "pending_upload";
    case ConversationState::published:
        return "published";
    case ConversationState::deleted:
        return "deleted";
    }
    return "unknown";
}

std::optional<ConversationState> parse_conversation_state(std::string_view text) {
    for (auto state : {ConversationState::recording, ConversationState::pending_upload,
                       ConversationState::published, ConversationState::deleted}) {
        if (to_string(state) == text) {
            return state;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Boundary boundary) {
    switch (boundary) {
    case Boundary::new_conversation:
        return "new_conversation";
    case Boundary::continuation:
        return "continuation";
    case Boundary::no_change:
        return "no_change";
    }
    return "unknown";
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::opened:
        return "opened";
    case EventKind::appended:
        return "appended";
    case EventKind::finalized:
        return "finalized";
    case EventKind::rating_merged:
        return "rating_merged";
    }
    return "unknown";
}

std::string_view to_string(CaptureError::Code code) {
    switch (code) {
    case CaptureError::Code::terms_not_accepted:
        return "TermsNotAccepted";
    case CaptureError::Code::unknown_conversation:
        return "UnknownConversation";
    case CaptureError::Code::already_published:
        return "AlreadyPublished";
    case CaptureError::Code::index_out_of_range:
        return "IndexOutOfRange";
    case CaptureError::Code::not_a_model_response:
        return "NotAModelResponse";
    }
    return "Unknown";
}

CaptureError::CaptureError(Code code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

StringMap UserProfile::demographics() const {
    StringMap out;
    if (age) {
        out["age"] = std::to_string(*age);
    }
    if (country) {
        out["country"] = *country;
    }
    if (gender) {
        out["gender"] = *gender;
    }
    return out;
}

TurnDigest digest_turn(Role role, std::string_view text, TurnDigest salt) {
    // FNV-1a over salt, role tag and text.
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) {
        mix(static_cast<unsigned char>(salt >> (8 * i)));
    }
    mix(role == Role::user ? 'u' : 'm');
    for (char c : text) {
        mix(static_cast<unsigned char>(c));
    }
    return h;
}

Boundary detect_boundary(const CapturedConversation* active, const Snapshot& snap, TurnDigest salt) {
    if (active == nullptr || snap.url != active->url) {
        return Boundary::new_conversation;
    }
    const std::size_t prefix = active->page_prefix.size();
    const std::size_t expected = prefix + active->messages.size();
    if (snap.turns.size() < expected) {
        return Boundary::new_conversation;
    }
    for (std::size_t i = 0; i < prefix; ++i) {
        if (digest_turn(snap.turns[i].role, snap.turns[i].text, salt) != active->page_prefix[i]) {
            return Boundary::new_conversation;
        }
    }
    for (std::size_t i = 0; i < active->messages.size(); ++i) {
        const Turn& turn = snap.turns[prefix + i];
        const Message& message = active->messages[i];
        if (turn.role != message.role || turn.text != message.text) {
            return Boundary::new_conversation;
        }
    }
    return snap.turns.size() == expected ? Boundary::no_change : Boundary::continuation;
}

std::vector<std::string> UploadBatch::conversation_ids() const {
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const auto& r : records) {
        ids.push_back(r.conversation_id);
    }
    return ids;
}

nlohmann::ordered_json to_json(const UploadBatch& batch) {
    nlohmann::ordered_json out;
    out["user_id"] = batch.user_id;
    out["profile_snapshot"] = string_map_to_json(batch.profile_snapshot);
    auto& records = out["records"] = nlohmann::ordered_json::array();
    for (const auto& r : batch.records) {
        records.push_back(record_to_json(r));
    }
    return out;
}

UploadBatch upload_batch_from_json(const nlohmann::json& value) {
    if (!value.is_object()) {
        throw ParseError(0, "batch: expected object");
    }
    UploadBatch batch;
    if (!value.contains("user_id") || !value["user_id"].is_string()) {
        throw ParseError(0, "batch.user_id: expected string");
    }
    batch.user_id = value["user_id"].get<std::string>();
    if (value.contains("profile_snapshot") && !value["profile_snapshot"].is_null()) {
        batch.profile_snapshot = string_map_from_json(value["profile_snapshot"], "profile_snapshot");
    }
    if (!value.contains("records") || !value["records"].is_array()) {
        throw ParseError(0, "batch.records: expected array");
    }
    for (const auto& r : value["records"]) {
        batch.records.push_back(record_from_json(r));
    }
    return batch;
}

namespace {

std::string url_decode(std::string_view text) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size() && std::isxdigit(static_cast<unsigned char>(text[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(text[i + 2]))) {
            out.push_back(static_cast<char>(std::stoi(std::string(text.substr(i + 1, 2)), nullptr, 16)));
            i += 2;
        } else if (text[i] == '+') {
            out.push_back(' ');
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= path.size()) {
        auto next = path.find('/', pos);
        auto piece = path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

std::optional<std::string> non_empty(std::string value) {
    if (value.empty()) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::optional<std::string> model_hint_from_url(std::string_view url) {
    auto scheme_end = url.find("://");
    std::string_view rest = scheme_end == std::string_view::npos ? url : url.substr(scheme_end + 3);
    auto fragment = rest.find('#');
    if (fragment != std::string_view::npos) {
        rest = rest.substr(0, fragment);
    }
    auto query_pos = rest.find('?');
    std::string_view query = query_pos == std::string_view::npos ? std::string_view{} : rest.substr(query_pos + 1);
    rest = rest.substr(0, query_pos);
    auto slash = rest.find('/');
    std::string host(rest.substr(0, slash));
    std::string_view path = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash);
    if (auto at = host.rfind('@'); at != std::string::npos) {
        host.erase(0, at + 1);
    }
    if (auto colon = host.find(':'); colon != std::string::npos) {
        host.erase(colon);
    }
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::size_t pos = 0;
    while (pos < query.size()) {
        auto amp = query.find('&', pos);
        auto pair = query.substr(pos, amp == std::string_view::npos ? std::string_view::npos : amp - pos);
        if (pair.rfind("model=", 0) == 0) {
            if (auto value = non_empty(url_decode(pair.substr(6)))) {
                return value;
            }
        }
        if (amp == std::string_view::npos) {
            break;
        }
        pos = amp + 1;
    }

    auto segments = split_path(path);
    if (host == "huggingface.co" || host == "www.huggingface.co") {
        if (segments.size() >= 3 && segments[0] == "spaces") {
            return std::string(segments[1]) + "/" + std::string(segments[2]);
        }
        if (segments.size() >= 3 && segments[0] == "chat" && segments[1] == "models") {
            std::string name(segments[2]);
            if (segments.size() >= 4) {
                name += "/" + std::string(segments[3]);
            }
            return url_decode(name);
        }
    }
    constexpr std::string_view kSpaceHost = ".hf.space";
    if (host.size() > kSpaceHost.size() && host.ends_with(kSpaceHost)) {
        return host.substr(0, host.size() - kSpaceHost.size());
    }
    return std::nullopt;
}

// --- LocalStore --------------------------------------------------------------

LocalStore LocalStore::init(Timestamp now) {
    std::random_device device;
    std::uint64_t seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
    return init(now, seed);
}

LocalStore LocalStore::init(Timestamp /*now*/, std::uint64_t seed) {
    LocalStore store;
    store.engine_.seed(seed);
    store.profile_.user_id = make_uuid(store.engine_);
    store.salt_ = store.engine_();
    return store;
}

void LocalStore::accept_terms() {
    terms_accepted_ = true;
}

void LocalStore::set_sharing(bool enabled) {
    if (!enabled && active_id_) {
        // Turns exchanged while paused must not extend the current capture.
        auto& conversation = conversations_.at(*active_id_);
        finalize(conversation, conversation.updated_at);
    }
    sharing_enabled_ = enabled;
}

void LocalStore::set_demographics(std::optional<int> age, std::optional<std::string> country,
                                  std::optional<std::string> gender) {
    profile_.age = age;
    profile_.country = std::move(country);
    profile_.gender = std::move(gender);
}

const CapturedConversation* LocalStore::find(const std::string& id) const {
    auto it = conversations_.find(id);
    return it == conversations_.end() ? nullptr : &it->second;
}

const CapturedConversation* LocalStore::active() const {
    if (!active_id_) {
        return nullptr;
    }
    return find(*active_id_);
}

std::vector<const CapturedConversation*> LocalStore::visible_conversations() const {
    std::vector<const CapturedConversation*> out;
    for (const auto& [id, c] : conversations_) {
        if (c.state == ConversationState::recording || c.state == ConversationState::pending_upload) {
            out.push_back(&c);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto* a, const auto* b) { return a->created_at < b->created_at; });
    return out;
}

std::vector<TurnDigest> LocalStore::digests(const Snapshot& snap, std::size_t turn_count) const {
    std::vector<TurnDigest> out;
    out.reserve(turn_count);
    for (std::size_t i = 0; i < turn_count; ++i) {
        out.push_back(digest_turn(snap.turns[i].role, snap.turns[i].text, salt_));
    }
    return out;
}

void LocalStore::finalize(CapturedConversation& conversation, Timestamp now) {
    conversation.state = ConversationState::pending_upload;
    conversation.updated_at = now;
    if (active_id_ == conversation.id) {
        active_id_.reset();
    }
}

std::size_t LocalStore::merge_ratings(CapturedConversation& conversation, const Snapshot& snap) {
    std::size_t merged = 0;
    const std::size_t offset = conversation.page_prefix.size();
    for (std::size_t i = 0; i < conversation.messages.size() && offset + i < snap.turns.size(); ++i) {
        auto& message = conversation.messages[i];
        const auto& rating = snap.turns[offset + i].response_rating;
        if (rating && message.role == Role::model && message.response_rating != rating) {
            message.response_rating = rating;
            ++merged;
        }
    }
    return merged;
}

std::vector<StoreEvent> LocalStore::open_conversation(const Snapshot& snap, std::size_t turn_count,
                                                      Timestamp now) {
    auto page = digests(snap, turn_count);
    auto common_prefix = [&page](const std::vector<TurnDigest>& known) {
        auto limit = std::min(known.size(), page.size());
        std::size_t n = 0;
        while (n < limit && known[n] == page[n]) {
            ++n;
        }
        return n;
    };

    // Turns already owned by another local conversation, published or
    // deleted, are never captured a second time.
    std::size_t skip = 0;
    if (auto it = trails_.find(snap.url); it != trails_.end()) {
        skip = common_prefix(it->second.turns);
    }
    for (const auto& [id, tombstone] : tombstones_) {
        if (tombstone.url == snap.url) {
            skip = std::max(skip, common_prefix(tombstone.page_turns));
        }
    }
    if (skip >= turn_count) {
        return {};
    }

    CapturedConversation conversation;
    do {
        conversation.id = make_uuid(engine_);
    } while (conversations_.count(conversation.id) != 0 || tombstones_.count(conversation.id) != 0);
    conversation.url = snap.url;
    conversation.model_hint = model_hint_from_url(snap.url);
    conversation.created_at = now;
    conversation.updated_at = now;
    conversation.page_prefix.assign(page.begin(), page.begin() + static_cast<std::ptrdiff_t>(skip));
    for (std::size_t i = skip; i < turn_count; ++i) {
        const Turn& turn = snap.turns[i];
        Message m{conversation.messages.size(), turn.role, turn.text, std::nullopt};
        if (turn.role == Role::model) {
            m.response_rating = turn.response_rating;
        }
        conversation.messages.push_back(std::move(m));
    }

    std::vector<StoreEvent> events{{EventKind::opened, conversation.id, 0},
                                   {EventKind::appended, conversation.id, conversation.messages.size()}};
    active_id_ = conversation.id;
    conversations_.emplace(conversation.id, std::move(conversation));
    return events;
}

std::vector<StoreEvent> LocalStore::observe(const Snapshot& snap, Timestamp now) {
    if (!terms_accepted_) {
        throw CaptureError(CaptureError::Code::terms_not_accepted, "accept the terms of use first");
    }
    if (!sharing_enabled_) {
        return {};
    }

    // A blank or undecodable turn (typically a response still streaming)
    // ends the usable part of the transcript.
    std::size_t usable = 0;
    while (usable < snap.turns.size() && has_visible_text(snap.turns[usable].text) &&
           is_valid_utf8(snap.turns[usable].text)) {
        ++usable;
    }
    Snapshot view{snap.url, {snap.turns.begin(), snap.turns.begin() + static_cast<std::ptrdiff_t>(usable)},
                  snap.observed_at};

    std::vector<StoreEvent> events;
    CapturedConversation* current = active_id_ ? &conversations_.at(*active_id_) : nullptr;
    switch (detect_boundary(current, view, salt_)) {
    case Boundary::no_change:
        if (auto merged = merge_ratings(*current, view)) {
            current->updated_at = now;
            events.push_back({EventKind::rating_merged, current->id, merged});
        }
        break;
    case Boundary::continuation: {
        std::size_t merged = merge_ratings(*current, view);
        const std::size_t start = current->page_prefix.size() + current->messages.size();
        for (std::size_t i = start; i < view.turns.size(); ++i) {
            const Turn& turn = view.turns[i];
            Message m{current->messages.size(), turn.role, turn.text, std::nullopt};
            if (turn.role == Role::model) {
                m.response_rating = turn.response_rating;
            }
            current->messages.push_back(std::move(m));
        }
        current->updated_at = now;
        events.push_back({EventKind::appended, current->id, view.turns.size() - start});
        if (merged) {
            events.push_back({EventKind::rating_merged, current->id, merged});
        }
        break;
    }
    case Boundary::new_conversation:
        if (current) {
            finalize(*current, now);
            events.push_back({EventKind::finalized, current->id, 0});
        }
        for (auto& e : open_conversation(view, usable, now)) {
            events.push_back(std::move(e));
        }
        break;
    }

    trails_[view.url] = PageTrail{digests(view, usable), now};
    return events;
}

std::vector<std::string> LocalStore::finalize_idle(Timestamp now, Seconds threshold) {
    std::vector<std::string> finalized;
    for (auto& [id, c] : conversations_) {
        if (c.state == ConversationState::recording && c.updated_at < now - threshold) {
            finalize(c, now);
            finalized.push_back(id);
        }
    }
    return finalized;
}

CapturedConversation& LocalStore::require(const std::string& id) {
    auto it = conversations_.find(id);
    if (it == conversations_.end() || it->second.state == ConversationState::deleted) {
        throw CaptureError(CaptureError::Code::unknown_conversation, id);
    }
    return it->second;
}

CapturedConversation& LocalStore::require_mutable(const std::string& id) {
    auto& c = require(id);
    if (c.state == ConversationState::published || c.in_flight) {
        throw CaptureError(CaptureError::Code::already_published, id);
    }
    return c;
}

void LocalStore::rate_conversation(const std::string& id, Rating rating) {
    require_mutable(id).feedback.conversation_rating = rating;
}

void LocalStore::rate_response(const std::string& id, std::size_t message_index, Rating rating) {
    auto& c = require_mutable(id);
    if (message_index >= c.messages.size()) {
        throw CaptureError(CaptureError::Code::index_out_of_range,
                           id + " has no message " + std::to_string(message_index));
    }
    auto& message = c.messages[message_index];
    if (message.role != Role::model) {
        throw CaptureError(CaptureError::Code::not_a_model_response,
                           "message " + std::to_string(message_index) + " was written by the user");
    }
    message.response_rating = rating;
}

void LocalStore::delete_conversation(const std::string& id) {
    auto it = conversations_.find(id);
    if (it == conversations_.end()) {
        throw CaptureError(CaptureError::Code::unknown_conversation, id);
    }
    auto& c = it->second;
    if (c.state == ConversationState::deleted) {
        return;
    }
    if (c.state == ConversationState::published || c.in_flight) {
        throw CaptureError(CaptureError::Code::already_published, id);
    }

    Tombstone tombstone{c.created_at + kUploadDelay, c.url, c.page_prefix};
    for (const auto& m : c.messages) {
        tombstone.page_turns.push_back(digest_turn(m.role, m.text, salt_));
    }
    tombstones_[id] = std::move(tombstone);
    if (active_id_ == id) {
        active_id_.reset();
    }
    CapturedConversation erased;
    erased.id = id;
    erased.state = ConversationState::deleted;
    c = std::move(erased);
}

UnifiedRecord LocalStore::to_record(const CapturedConversation& c) const {
    UnifiedRecord r;
    r.conversation_id = c.id;
    r.conversation = c.messages;
    r.model_name = c.model_hint;
    r.user_id = profile_.user_id;
    r.timestamp = c.created_at;
    r.source = std::string(kPluginSource);
    r.user_metadata = profile_.demographics();
    r.conversation_metadata["url"] = c.url;
    if (c.feedback.conversation_rating) {
        r.conversation_metadata[std::string(kConversationRatingKey)] =
            std::string(to_string(*c.feedback.conversation_rating));
    }
    return r;
}

UploadBatch LocalStore::make_batch(const std::vector<std::string>& ids) {
    UploadBatch batch;
    batch.user_id = profile_.user_id;
    batch.profile_snapshot = profile_.demographics();
    for (const auto& id : ids) {
        auto& c = conversations_.at(id);
        c.in_flight = true;
        batch.records.push_back(to_record(c));
    }
    return batch;
}

UploadBatch LocalStore::collect_due_batch(Timestamp now) {
    purge_expired(now);
    std::vector<std::string> due;
    for (const auto& [id, c] : conversations_) {
        if (c.state == ConversationState::pending_upload && !c.in_flight && c.created_at + kUploadDelay <= now) {
            due.push_back(id);
        }
    }
    return make_batch(due);
}

UploadBatch LocalStore::publish_now(Timestamp now) {
    for (auto& [id, c] : conversations_) {
        if (c.state == ConversationState::recording) {
            finalize(c, now);
        }
    }
    std::vector<std::string> ids;
    for (const auto& [id, c] : conversations_) {
        if (c.state == ConversationState::pending_upload && !c.in_flight) {
            ids.push_back(id);
        }
    }
    return make_batch(ids);
}

void LocalStore::acknowledge(const UploadBatch& batch) {
    for (const auto& r : batch.records) {
        auto it = conversations_.find(r.conversation_id);
        if (it != conversations_.end() && it->second.in_flight) {
            it->second.state = ConversationState::published;
            conversations_.erase(it);
        }
    }
}

void LocalStore::abandon(const UploadBatch& batch) {
    for (const auto& r : batch.records) {
        auto it = conversations_.find(r.conversation_id);
        if (it != conversations_.end()) {
            it->second.in_flight = false;
        }
    }
}

void LocalStore::purge_expired(Timestamp now) {
    for (auto it = tombstones_.begin(); it != tombstones_.end();) {
        if (it->second.expires_at <= now) {
            conversations_.erase(it->first);
            it = tombstones_.erase(it);
        } else {
            ++it;
        }
    }
    // Trails hold digests only, never content. They outlive tombstones so a
    // page left open after a delete is not recaptured once the tombstone
    // expires; only the least recently seen pages are forgotten.
    while (trails_.size() > kMaxPageTrails) {
        auto oldest = trails_.begin();
        for (auto it = trails_.begin(); it != trails_.end(); ++it) {
            if (it->second.last_seen < oldest->second.last_seen) oldest = it;
        }
        trails_.erase(oldest);
    }
}

// --- persistence ---------------------------------------------------------------

namespace {

nlohmann::ordered_json optional_json(const std::optional<std::string>& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

std::optional<std::string> optional_from(const nlohmann::json& value) {
    if (value.is_null()) {
        return std::nullopt;
    }
    return value.get<std::string>();
}

Timestamp timestamp_from(const nlohmann::json& value, const char* what) {
    auto ts = parse_rfc3339(value.get<std::string>());
    if (!ts) {
        throw ParseError(0, std::string(what) + ": expected RFC 3339 timestamp");
    }
    return *ts;
}

}  // namespace

nlohmann::ordered_json LocalStore::to_json() const {
    nlohmann::ordered_json out;
    out["format"] = "sharelm-local-store";
    out["version"] = 1;
    out["terms_accepted"] = terms_accepted_;
    out["sharing_enabled"] = sharing_enabled_;
    out["profile"] = {{"user_id", profile_.user_id},
                      {"age", profile_.age ? nlohmann::ordered_json(*profile_.age) : nlohmann::ordered_json(nullptr)},
                      {"country", optional_json(profile_.country)},
                      {"gender", optional_json(profile_.gender)}};
    out["active_id"] = optional_json(active_id_);
    out["digest_salt"] = salt_;
    std::ostringstream engine_state;
    engine_state << engine_;
    out["rng_state"] = engine_state.str();

    auto& conversations = out["conversations"] = nlohmann::ordered_json::array();
    for (const auto& [id, c] : conversations_) {
        nlohmann::ordered_json item;
        item["id"] = c.id;
        item["state"] = to_string(c.state);
        auto& messages = item["messages"] = nlohmann::ordered_json::array();
        for (const auto& m : c.messages) {
            messages.push_back(message_to_json(m));
        }
        item["url"] = c.url;
        item["model_hint"] = optional_json(c.model_hint);
        item["created_at"] = format_rfc3339(c.created_at);
        item["updated_at"] = format_rfc3339(c.updated_at);
        item["conversation_rating"] =
            c.feedback.conversation_rating ? nlohmann::ordered_json(to_string(*c.feedback.conversation_rating))
                                           : nlohmann::ordered_json(nullptr);
        item["page_prefix"] = c.page_prefix;
        item["in_flight"] = c.in_flight;
        conversations.push_back(std::move(item));
    }
    auto& tombstones = out["tombstones"] = nlohmann::ordered_json::array();
    for (const auto& [id, t] : tombstones_) {
        tombstones.push_back({{"id", id},
                              {"expires_at", format_rfc3339(t.expires_at)},
                              {"url", t.url},
                              {"page_turns", t.page_turns}});
    }
    auto& trails = out["trails"] = nlohmann::ordered_json::array();
    for (const auto& [url, trail] : trails_) {
        trails.push_back({{"url", url}, {"turns", trail.turns}, {"last_seen", format_rfc3339(trail.last_seen)}});
    }
    return out;
}

LocalStore LocalStore::from_json(const nlohmann::json& value) {
    try {
        if (value.at("format") != "sharelm-local-store" || value.at("version") != 1) {
            throw ParseError(0, "not a version 1 local store document");
        }
        LocalStore store;
        store.terms_accepted_ = value.at("terms_accepted").get<bool>();
        store.sharing_enabled_ = value.at("sharing_enabled").get<bool>();
        const auto& profile = value.at("profile");
        store.profile_.user_id = profile.at("user_id").get<std::string>();
        if (!profile.at("age").is_null()) {
            store.profile_.age = profile.at("age").get<int>();
        }
        store.profile_.country = optional_from(profile.at("country"));
        store.profile_.gender = optional_from(profile.at("gender"));
        store.active_id_ = optional_from(value.at("active_id"));
        store.salt_ = value.at("digest_salt").get<TurnDigest>();
        std::istringstream engine_state(value.at("rng_state").get<std::string>());
        engine_state >> store.engine_;
        if (!engine_state) {
            throw ParseError(0, "rng_state: unreadable engine state");
        }

        for (const auto& item : value.at("conversations")) {
            CapturedConversation c;
            c.id = item.at("id").get<std::string>();
            auto state = parse_conversation_state(item.at("state").get<std::string>());
            if (!state) {
                throw ParseError(0, "conversation state: unknown value");
            }
            c.state = *state;
            const auto& messages = item.at("messages");
            for (std::size_t i = 0; i < messages.size(); ++i) {
                c.messages.push_back(message_from_json(messages[i], "messages[" + std::to_string(i) + "]"));
            }
            c.url = item.at("url").get<std::string>();
            c.model_hint = optional_from(item.at("model_hint"));
            c.created_at = timestamp_from(item.at("created_at"), "created_at");
            c.updated_at = timestamp_from(item.at("updated_at"), "updated_at");
            if (auto rating = optional_from(item.at("conversation_rating"))) {
                c.feedback.conversation_rating = parse_rating(*rating);
            }
            c.page_prefix = item.at("page_prefix").get<std::vector<TurnDigest>>();
            c.in_flight = item.at("in_flight").get<bool>();
            store.conversations_.emplace(c.id, std::move(c));
        }
        for (const auto& item : value.at("tombstones")) {
            store.tombstones_[item.at("id").get<std::string>()] =
                Tombstone{timestamp_from(item.at("expires_at"), "expires_at"), item.at("url").get<std::string>(),
                          item.at("page_turns").get<std::vector<TurnDigest>>()};
        }
        for (const auto& item : value.at("trails")) {
            store.trails_[item.at("url").get<std::string>()] =
                PageTrail{item.at("turns").get<std::vector<TurnDigest>>(),
                          timestamp_from(item.at("last_seen"), "last_seen")};
        }
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("local store: ") + e.what());
    }
}

void LocalStore::save(const std::filesystem::path& path) const {
    write_file_atomically(path, to_json().dump(2) + "\n");
}

LocalStore LocalStore::load(const std::filesystem::path& path) {
    auto text = read_file(path);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, "local store: malformed JSON");
    }
    return from_json(value);
}

}  // namespace sharelm::capture
