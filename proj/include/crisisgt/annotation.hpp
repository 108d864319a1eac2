#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crisisgt/ranker.hpp"
#include "crisisgt/summary_record.hpp"
#include "crisisgt/taxonomy.hpp"
#include "json.hpp"

namespace crisisgt {

enum class SessionMode { GroundTruth, QualityAssessment };
enum class SessionState { Open, Finalized };

std::string_view to_string(SessionMode mode);
std::optional<SessionMode> parse_session_mode(std::string_view text);
std::string_view to_string(SessionState state);

struct SessionSpec {
    std::string session_id;
    std::string dataset;
    std::string annotator_id;
    SessionMode mode = SessionMode::GroundTruth;
    std::vector<CandidateSet> candidates;
    std::size_t budget = 40;
    std::uint64_t seed = 0;
    /// GroundTruth sessions may finalize with fewer than budget tweets.
    bool allow_short = false;
};

struct AnnotationSession {
    SessionSpec spec;
    /// Candidate lists in presentation (shuffled) order.
    std::vector<CandidateSet> candidates;
    /// Selected tweets in selection order.
    std::vector<std::pair<TopicLabel, std::string>> selections;
    SessionState state = SessionState::Open;
    std::optional<SummaryRecord> summary;

    std::size_t selected_count() const { return selections.size(); }
    std::size_t remaining() const { return spec.budget - selections.size(); }
    bool is_selected(std::string_view tweet_id) const;
    std::map<TopicLabel, std::vector<std::string>> selections_by_topic() const;
};

/// Validates the spec and shuffles each topic's candidates with a permutation
/// derived from the session seed and the topic.
AnnotationSession open_session(SessionSpec spec);

/// Flips membership; returns whether the tweet is selected afterwards.
/// Errors: SessionFinalized, UnknownTweet, BudgetExceeded (state unchanged).
bool toggle_selection(AnnotationSession& session, TopicLabel topic, std::string_view tweet_id);

/// Finalizes and returns the summary (method "human:<annotator>").
/// Errors: SessionFinalized, UnderBudget ("N below budget").
SummaryRecord finalize(AnnotationSession& session);

nlohmann::json session_to_json(const AnnotationSession& session);

struct Rating {
    std::string rater_id;
    std::string session_id;
    double coverage = 0.0;
    double relevance = 0.0;
    double diversity = 0.0;
    std::optional<double> qa_score;

    bool operator==(const Rating&) const = default;
};

/// Factors in [1, 5], qa_score in [1, 10]; throws Error(InvalidRating).
void validate_rating(const Rating& rating);
nlohmann::json rating_to_json(const Rating& rating);
Rating rating_from_json(const nlohmann::json& json);

/// max(1, ceil(0.02 n)) for n >= 1; zero for n = 0.
std::size_t qa_sample_size(std::size_t n);

struct QualitySample {
    std::map<TopicLabel, std::vector<std::string>> tweets;
};

/// Uniform sample per topic, deterministic in the seed.
QualitySample qa_sample(const TopicAssignment& assignment, std::uint64_t seed);

struct QaVerdict {
    std::string annotator_id;
    double mean_qa = 0.0;
    bool passed = false;
};

/// passed iff mean qa_score > 7. Ratings without a qa_score are ignored;
/// throws Error(InvalidArgument) when none carry one.
QaVerdict qa_verdict(std::string annotator_id, const std::vector<Rating>& ratings);

/// Passing annotators by decreasing mean, ties by id, at most top of them.
std::vector<QaVerdict> rank_annotators(std::vector<QaVerdict> verdicts, std::size_t top = 3);

struct AggregateRating {
    double coverage = 0.0;
    double relevance = 0.0;
    double diversity = 0.0;
    std::size_t count = 0;
};

/// Mean per factor rounded to two decimals.
AggregateRating aggregate_ratings(const std::vector<Rating>& ratings);

struct Event {
    std::string ts;
    std::string session_id;
    std::string action;
    nlohmann::json payload;

    bool operator==(const Event&) const = default;
};

/// Compact single-line JSON {ts, session_id, action, payload}.
std::string event_to_line(const Event& event);
Event event_from_line(std::string_view line);

using Clock = std::function<std::string()>;
/// UTC time as 2026-01-31T12:00:00.000Z.
std::string utc_timestamp();

struct FinalizeResult {
    SummaryRecord summary;
    /// The session was already finalized; the stored record is returned.
    bool replay = false;
};

// All annotation sessions and ratings, mutated only through methods that
// append an event. Replaying the emitted events rebuilds the same store.
class SessionStore {
public:
    explicit SessionStore(Clock clock = utc_timestamp);

    /// Called with every event before the mutation is applied; a throwing
    /// sink aborts the mutation.
    void set_sink(std::function<void(const Event&)> sink) { sink_ = std::move(sink); }

    /// An empty session_id is replaced by the next "s<N>". Errors:
    /// DuplicateSession for an existing (dataset, annotator, mode).
    const AnnotationSession& open(SessionSpec spec);
    bool toggle(std::string_view session_id, TopicLabel topic, std::string_view tweet_id);
    FinalizeResult finalize(std::string_view session_id);
    /// The target session must be finalized; qa_score only on QA sessions.
    void add_rating(const Rating& rating);

    const AnnotationSession& get(std::string_view session_id) const;
    const AnnotationSession* find(std::string_view session_id) const;
    std::vector<std::string> session_ids() const;
    std::vector<Rating> ratings_for(std::string_view session_id) const;
    const std::vector<Rating>& ratings() const { return ratings_; }
    QaVerdict verdict(std::string_view annotator_id) const;
    const std::vector<Event>& events() const { return events_; }

    /// Applies one recorded event, keeping its timestamp.
    void apply(const Event& event);
    static SessionStore replay(const std::vector<Event>& events, Clock clock = utc_timestamp);

    /// Canonical JSON of every session and rating.
    std::string state_json() const;

private:
    AnnotationSession& mutable_session(std::string_view session_id);
    void record(Event event);
    void apply_unlogged(const Event& event);

    Clock clock_;
    std::function<void(const Event&)> sink_;
    std::map<std::string, AnnotationSession> sessions_;
    std::vector<Rating> ratings_;
    std::vector<Event> events_;
    std::size_t next_id_ = 1;
};

struct LogLoad {
    std::vector<Event> events;
    /// Bytes of an incomplete final record that were discarded.
    std::size_t truncated_bytes = 0;
};

// Append-only JSONL event log; each append is flushed and synced.
class EventLog {
public:
    explicit EventLog(std::filesystem::path path);
    ~EventLog();
    EventLog(const EventLog&) = delete;
    EventLog& operator=(const EventLog&) = delete;

    /// Reads every record. An unparsable or unterminated final line is
    /// dropped and, when repair is set, cut from the file. Any other bad
    /// line raises Error(CorruptLog) naming its line number.
    static LogLoad load(const std::filesystem::path& path, bool repair = true);

    void append(const Event& event);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

}  // namespace crisisgt
