#pragma once

#include "sharelm/capture/store.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sharelm::capture {

/// Drives the simulated clock for a scripted session.
///
///   {"start": "2024-01-01T00:00:00Z", "seed": 7, "idle_threshold_seconds": 1800,
///    "advances": [{"before_step": 3, "seconds": 86400}]}
struct ClockScript {
    Timestamp start{};
    std::uint64_t seed = 0;
    Seconds idle_threshold = kDefaultIdleThreshold;
    std::map<std::size_t, Seconds> advances;
};

ClockScript clock_script_from_json(const nlohmann::json& value);

/// Replays scripted session steps (one JSON object per line) against a
/// LocalStore and returns one trace object per step.
///
/// Step ops: accept_terms, snapshot {url, turns}, set_sharing {enabled},
/// set_profile {age, country, gender}, rate_conversation {conversation, rating},
/// rate_response {conversation, index, rating}, delete {conversation},
/// tick, publish_now, transport {ack}.
///
/// "conversation" is either the ordinal of an opened conversation within the
/// session (0 = first opened) or a literal conversation id. Operation errors
/// are recorded in the trace rather than aborting the replay.
class SessionReplayer {
public:
    explicit SessionReplayer(ClockScript clock);

    nlohmann::ordered_json apply(const nlohmann::json& step);

    std::vector<std::string> run(const std::vector<std::string>& session_lines);

    const LocalStore& store() const noexcept { return store_; }
    Timestamp now() const noexcept { return now_; }

private:
    std::string resolve(const nlohmann::json& ref) const;
    void deliver(UploadBatch& batch, nlohmann::ordered_json& line);

    ClockScript clock_;
    LocalStore store_;
    Timestamp now_;
    std::size_t step_ = 0;
    std::vector<std::string> opened_;
    bool transport_ok_ = true;
};

Snapshot snapshot_from_json(const nlohmann::json& value);

}  // namespace sharelm::capture
