#include "sharelm/capture/replay.hpp"

#include "sharelm/json_codec.hpp"

namespace sharelm::capture {

namespace {

Rating rating_from(const nlohmann::json& value) {
    auto rating = value.is_string() ? parse_rating(value.get<std::string>()) : std::nullopt;
    if (!rating) {
        throw ParseError(0, "rating: expected thumbs_up or thumbs_down");
    }
    return *rating;
}

nlohmann::ordered_json events_to_json(const std::vector<StoreEvent>& events) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json item;
        item["event"] = to_string(e.kind);
        item["conversation_id"] = e.conversation_id;
        if (e.kind == EventKind::appended || e.kind == EventKind::rating_merged) {
            item["count"] = e.count;
        }
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace

ClockScript clock_script_from_json(const nlohmann::json& value) {
    ClockScript clock;
    try {
        auto start = parse_rfc3339(value.at("start").get<std::string>());
        if (!start) {
            throw ParseError(0, "clock.start: expected YYYY-MM-DDTHH:MM:SSZ");
        }
        clock.start = *start;
        clock.seed = value.value("seed", std::uint64_t{0});
        clock.idle_threshold = Seconds{value.value("idle_threshold_seconds", kDefaultIdleThreshold.count())};
        if (value.contains("advances")) {
            for (const auto& a : value.at("advances")) {
                clock.advances[a.at("before_step").get<std::size_t>()] += Seconds{a.at("seconds").get<long long>()};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("clock script: ") + e.what());
    }
    return clock;
}

Snapshot snapshot_from_json(const nlohmann::json& value) {
    Snapshot snap;
    snap.url = value.at("url").get<std::string>();
    for (const auto& t : value.at("turns")) {
        Turn turn;
        auto role = parse_role(t.at("role").get<std::string>());
        if (!role) {
            throw ParseError(0, "turn.role: expected user or model");
        }
        turn.role = *role;
        turn.text = t.at("text").get<std::string>();
        if (t.contains("response_rating") && !t.at("response_rating").is_null()) {
            turn.response_rating = rating_from(t.at("response_rating"));
        }
        snap.turns.push_back(std::move(turn));
    }
    return snap;
}

SessionReplayer::SessionReplayer(ClockScript clock)
    : clock_(std::move(clock)), store_(LocalStore::init(clock_.start, clock_.seed)), now_(clock_.start) {}

std::string SessionReplayer::resolve(const nlohmann::json& ref) const {
    if (ref.is_number_integer()) {
        auto value = ref.get<std::int64_t>();
        if (value < 0) {
            throw CaptureError(CaptureError::Code::unknown_conversation, "negative conversation ordinal");
        }
        auto ordinal = static_cast<std::size_t>(value);
        if (ordinal >= opened_.size()) {
            throw CaptureError(CaptureError::Code::unknown_conversation,
                               "no conversation with ordinal " + std::to_string(ordinal));
        }
        return opened_[ordinal];
    }
    return ref.get<std::string>();
}

void SessionReplayer::deliver(UploadBatch& batch, nlohmann::ordered_json& line) {
    line["batch"] = to_json(batch);
    line["ack"] = transport_ok_;
    if (transport_ok_) {
        store_.acknowledge(batch);
    } else {
        store_.abandon(batch);
    }
}

nlohmann::ordered_json SessionReplayer::apply(const nlohmann::json& step) {
    if (auto it = clock_.advances.find(step_); it != clock_.advances.end()) {
        now_ += it->second;
    }
    nlohmann::ordered_json line;
    line["step"] = step_++;
    line["at"] = format_rfc3339(now_);
    const std::string op = step.value("op", "");
    line["op"] = op;

    try {
        if (op == "accept_terms") {
            store_.accept_terms();
        } else if (op == "snapshot") {
            auto events = store_.observe(snapshot_from_json(step), now_);
            for (const auto& e : events) {
                if (e.kind == EventKind::opened) {
                    opened_.push_back(e.conversation_id);
                }
            }
            line["events"] = events_to_json(events);
        } else if (op == "set_sharing") {
            store_.set_sharing(step.at("enabled").get<bool>());
        } else if (op == "set_profile") {
            auto text = [&step](const char* key) -> std::optional<std::string> {
                if (!step.contains(key) || step.at(key).is_null()) {
                    return std::nullopt;
                }
                return step.at(key).get<std::string>();
            };
            std::optional<int> age;
            if (step.contains("age") && !step.at("age").is_null()) {
                age = step.at("age").get<int>();
            }
            store_.set_demographics(age, text("country"), text("gender"));
        } else if (op == "rate_conversation") {
            store_.rate_conversation(resolve(step.at("conversation")), rating_from(step.at("rating")));
        } else if (op == "rate_response") {
            store_.rate_response(resolve(step.at("conversation")), step.at("index").get<std::size_t>(),
                                 rating_from(step.at("rating")));
        } else if (op == "delete") {
            store_.delete_conversation(resolve(step.at("conversation")));
        } else if (op == "tick") {
            line["finalized"] = store_.finalize_idle(now_, clock_.idle_threshold);
            auto batch = store_.collect_due_batch(now_);
            deliver(batch, line);
        } else if (op == "publish_now") {
            auto batch = store_.publish_now(now_);
            deliver(batch, line);
        } else if (op == "transport") {
            transport_ok_ = step.at("ack").get<bool>();
        } else {
            line["error"] = "UnknownOp";
        }
    } catch (const CaptureError& e) {
        line["error"] = to_string(e.code());
    } catch (const nlohmann::json::exception& e) {
        line["error"] = "MalformedStep";
    } catch (const ParseError& e) {
        line["error"] = "MalformedStep";
    }
    return line;
}

std::vector<std::string> SessionReplayer::run(const std::vector<std::string>& session_lines) {
    std::vector<std::string> trace;
    trace.reserve(session_lines.size());
    for (const auto& text : session_lines) {
        nlohmann::json step;
        try {
            step = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(e.byte, "session line " + std::to_string(step_) + ": malformed JSON");
        }
        trace.push_back(apply(step).dump());
    }
    return trace;
}

}  // namespace sharelm::capture
