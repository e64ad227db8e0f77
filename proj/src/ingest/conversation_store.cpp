#include "sharelm/ingest/conversation_store.hpp"

namespace sharelm::ingest {

std::string_view to_string(StoredStatus status) {
    switch (status) {
    case StoredStatus::active:
        return "active";
    case StoredStatus::quarantined:
        return "quarantined";
    case StoredStatus::removed:
        return "removed";
    }
    return "active";
}

std::optional<StoredStatus> parse_stored_status(std::string_view text) {
    if (text == "active") return StoredStatus::active;
    if (text == "quarantined") return StoredStatus::quarantined;
    if (text == "removed") return StoredStatus::removed;
    return std::nullopt;
}

std::string_view to_string(RequestKind kind) {
    return kind == RequestKind::report ? "report" : "self_removal";
}

std::string_view to_string(RequestState state) {
    switch (state) {
    case RequestState::received:
        return "received";
    case RequestState::verified:
        return "verified";
    case RequestState::rejected:
        return "rejected";
    case RequestState::executed:
        return "executed";
    }
    return "received";
}

}  // namespace sharelm::ingest
