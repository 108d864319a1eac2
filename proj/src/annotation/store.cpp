#include <algorithm>
#include <chrono>
#include <ctime>

#include <fmt/format.h>

#include "crisisgt/annotation.hpp"
#include "crisisgt/error.hpp"

namespace crisisgt {

using nlohmann::json;

std::string event_to_line(const Event& event) {
    const json line = {{"ts", event.ts},
                       {"session_id", event.session_id},
                       {"action", event.action},
                       {"payload", event.payload}};
    return line.dump();
}

Event event_from_line(std::string_view line) {
    try {
        const json root = json::parse(line);
        Event event;
        event.ts = root.at("ts").get<std::string>();
        event.session_id = root.at("session_id").get<std::string>();
        event.action = root.at("action").get<std::string>();
        event.payload = root.at("payload");
        return event;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, fmt::format("malformed event: {}", e.what()));
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&seconds, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                       tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
}

namespace {

json spec_to_json(const SessionSpec& spec) {
    json candidates = json::array();
    for (const auto& set : spec.candidates) {
        candidates.push_back({{"topic", to_string(set.topic)},
                              {"ranked_ids", set.ranked_ids},
                              {"texts", set.texts},
                              {"source_size", set.source_size}});
    }
    return {{"dataset", spec.dataset},
            {"annotator_id", spec.annotator_id},
            {"mode", to_string(spec.mode)},
            {"budget", spec.budget},
            {"seed", spec.seed},
            {"allow_short", spec.allow_short},
            {"candidates", candidates}};
}

TopicLabel topic_field(const json& value) {
    const auto topic = parse_topic(value.get<std::string>());
    if (!topic) throw Error(ErrorCode::InvalidArgument, fmt::format("unknown topic {}", value.dump()));
    return *topic;
}

SessionSpec spec_from_json(const std::string& session_id, const json& in) {
    SessionSpec spec;
    spec.session_id = session_id;
    spec.dataset = in.at("dataset").get<std::string>();
    spec.annotator_id = in.at("annotator_id").get<std::string>();
    const auto mode = parse_session_mode(in.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::InvalidArgument, "unknown session mode");
    spec.mode = *mode;
    spec.budget = in.at("budget").get<std::size_t>();
    spec.seed = in.at("seed").get<std::uint64_t>();
    spec.allow_short = in.at("allow_short").get<bool>();
    for (const auto& set : in.at("candidates")) {
        CandidateSet c;
        c.topic = topic_field(set.at("topic"));
        c.ranked_ids = set.at("ranked_ids").get<std::vector<std::string>>();
        c.texts = set.at("texts").get<std::vector<std::string>>();
        c.source_size = set.at("source_size").get<std::size_t>();
        spec.candidates.push_back(std::move(c));
    }
    return spec;
}

// Keeps generated ids ahead of any "s<N>" already in use.
std::size_t numeric_suffix(const std::string& id) {
    if (id.size() < 2 || id[0] != 's') return 0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
        if (id[i] < '0' || id[i] > '9' || n > 1'000'000'000) return 0;
        n = n * 10 + static_cast<std::size_t>(id[i] - '0');
    }
    return n;
}

}  // namespace

SessionStore::SessionStore(Clock clock) : clock_(std::move(clock)) {}

const AnnotationSession* SessionStore::find(std::string_view session_id) const {
    auto it = sessions_.find(std::string(session_id));
    return it == sessions_.end() ? nullptr : &it->second;
}

const AnnotationSession& SessionStore::get(std::string_view session_id) const {
    const AnnotationSession* session = find(session_id);
    if (session == nullptr) {
        throw Error(ErrorCode::UnknownSession, fmt::format("unknown session {}", session_id));
    }
    return *session;
}

AnnotationSession& SessionStore::mutable_session(std::string_view session_id) {
    return const_cast<AnnotationSession&>(get(session_id));
}

std::vector<std::string> SessionStore::session_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, session] : sessions_) ids.push_back(id);
    return ids;
}

std::vector<Rating> SessionStore::ratings_for(std::string_view session_id) const {
    std::vector<Rating> out;
    for (const auto& r : ratings_) {
        if (r.session_id == session_id) out.push_back(r);
    }
    return out;
}

QaVerdict SessionStore::verdict(std::string_view annotator_id) const {
    std::vector<Rating> scored;
    for (const auto& r : ratings_) {
        const AnnotationSession* session = find(r.session_id);
        if (session && session->spec.annotator_id == annotator_id && r.qa_score) scored.push_back(r);
    }
    return qa_verdict(std::string(annotator_id), scored);
}

void SessionStore::record(Event event) {
    if (sink_) sink_(event);
    events_.push_back(std::move(event));
}

const AnnotationSession& SessionStore::open(SessionSpec spec) {
    if (spec.session_id.empty()) {
        while (sessions_.count(fmt::format("s{}", next_id_))) ++next_id_;
        spec.session_id = fmt::format("s{}", next_id_);
    }
    Event event{clock_(), spec.session_id, "open", spec_to_json(spec)};
    const std::size_t next_id = next_id_;
    apply_unlogged(event);
    try {
        record(std::move(event));
    } catch (...) {
        sessions_.erase(spec.session_id);
        next_id_ = next_id;
        throw;
    }
    return sessions_.at(spec.session_id);
}

bool SessionStore::toggle(std::string_view session_id, TopicLabel topic, std::string_view tweet_id) {
    AnnotationSession& session = mutable_session(session_id);
    AnnotationSession updated = session;
    const bool selected = toggle_selection(updated, topic, tweet_id);
    record(Event{clock_(), std::string(session_id), "toggle",
                 {{"topic", to_string(topic)}, {"tweet_id", tweet_id}}});
    session = std::move(updated);
    return selected;
}

FinalizeResult SessionStore::finalize(std::string_view session_id) {
    AnnotationSession& session = mutable_session(session_id);
    if (session.state == SessionState::Finalized) return FinalizeResult{*session.summary, true};
    AnnotationSession updated = session;
    SummaryRecord summary = crisisgt::finalize(updated);
    record(Event{clock_(), std::string(session_id), "finalize", json::object()});
    session = std::move(updated);
    return FinalizeResult{std::move(summary), false};
}

void SessionStore::add_rating(const Rating& rating) {
    Event event{clock_(), rating.session_id, "rating", rating_to_json(rating)};
    const std::size_t before = ratings_.size();
    apply_unlogged(event);
    try {
        record(std::move(event));
    } catch (...) {
        ratings_.resize(before);
        throw;
    }
}

void SessionStore::apply_unlogged(const Event& event) {
    if (event.action == "open") {
        SessionSpec spec = spec_from_json(event.session_id, event.payload);
        if (sessions_.count(spec.session_id)) {
            throw Error(ErrorCode::DuplicateSession, fmt::format("session {} already exists", spec.session_id));
        }
        for (const auto& [id, existing] : sessions_) {
            if (existing.spec.dataset == spec.dataset && existing.spec.annotator_id == spec.annotator_id &&
                existing.spec.mode == spec.mode) {
                throw Error(ErrorCode::DuplicateSession,
                            fmt::format("annotator {} already has {} session {} on {}", spec.annotator_id,
                                        to_string(spec.mode), id, spec.dataset));
            }
        }
        AnnotationSession session = open_session(std::move(spec));
        next_id_ = std::max(next_id_, numeric_suffix(session.spec.session_id) + 1);
        sessions_.emplace(session.spec.session_id, std::move(session));
    } else if (event.action == "toggle") {
        toggle_selection(mutable_session(event.session_id), topic_field(event.payload.at("topic")),
                         event.payload.at("tweet_id").get<std::string>());
    } else if (event.action == "finalize") {
        crisisgt::finalize(mutable_session(event.session_id));
    } else if (event.action == "rating") {
        Rating rating = rating_from_json(event.payload);
        validate_rating(rating);
        const AnnotationSession& session = get(rating.session_id);
        if (session.state != SessionState::Finalized) {
            throw Error(ErrorCode::SessionOpen,
                        fmt::format("session {} must be finalized before it is rated", rating.session_id));
        }
        if (rating.qa_score && session.spec.mode != SessionMode::QualityAssessment) {
            throw Error(ErrorCode::InvalidRating, "qa_score applies to quality assessment sessions only");
        }
        ratings_.push_back(std::move(rating));
    } else {
        throw Error(ErrorCode::CorruptLog, fmt::format("unknown event action \"{}\"", event.action));
    }
}

void SessionStore::apply(const Event& event) {
    apply_unlogged(event);
    events_.push_back(event);
}

SessionStore SessionStore::replay(const std::vector<Event>& events, Clock clock) {
    SessionStore store(std::move(clock));
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            store.apply(events[i]);
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptLog, fmt::format("event {} cannot be replayed: {}", i + 1, e.what()));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::CorruptLog, fmt::format("event {} is malformed: {}", i + 1, e.what()));
        }
    }
    return store;
}

std::string SessionStore::state_json() const {
    json sessions = json::array();
    for (const auto& [id, session] : sessions_) sessions.push_back(session_to_json(session));
    json ratings = json::array();
    for (const auto& r : ratings_) ratings.push_back(rating_to_json(r));
    return json{{"sessions", sessions}, {"ratings", ratings}}.dump(2);
}

}  // namespace crisisgt
