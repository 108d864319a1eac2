#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "crisisgt/annotation.hpp"
#include "crisisgt/error.hpp"
#include "crisisgt/random.hpp"

namespace crisisgt {

using nlohmann::json;

std::string_view to_string(SessionMode mode) {
    return mode == SessionMode::GroundTruth ? "ground_truth" : "quality_assessment";
}

std::optional<SessionMode> parse_session_mode(std::string_view text) {
    if (text == "ground_truth" || text == "GroundTruth") return SessionMode::GroundTruth;
    if (text == "quality_assessment" || text == "QualityAssessment") return SessionMode::QualityAssessment;
    return std::nullopt;
}

std::string_view to_string(SessionState state) { return state == SessionState::Open ? "open" : "finalized"; }

bool AnnotationSession::is_selected(std::string_view tweet_id) const {
    return std::any_of(selections.begin(), selections.end(), [&](const auto& s) { return s.second == tweet_id; });
}

std::map<TopicLabel, std::vector<std::string>> AnnotationSession::selections_by_topic() const {
    std::map<TopicLabel, std::vector<std::string>> out;
    for (const auto& [topic, id] : selections) out[topic].push_back(id);
    return out;
}

AnnotationSession open_session(SessionSpec spec) {
    if (spec.budget < 1) throw Error(ErrorCode::InvalidArgument, "session budget must be at least 1");
    if (spec.dataset.empty() || spec.annotator_id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "a session needs a dataset and an annotator id");
    }
    std::size_t total = 0;
    std::set<TopicLabel> topics;
    std::set<std::string> ids;
    for (const auto& set : spec.candidates) {
        if (set.topic == TopicLabel::Irrelevant) {
            throw Error(ErrorCode::InvalidArgument, "Irrelevant tweets cannot be candidates");
        }
        if (!topics.insert(set.topic).second) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("topic {} appears twice in the candidates", to_string(set.topic)));
        }
        for (const auto& id : set.ranked_ids) {
            if (!ids.insert(id).second) {
                throw Error(ErrorCode::InvalidArgument, fmt::format("tweet {} is a candidate twice", id));
            }
        }
        total += set.ranked_ids.size();
    }
    if (total == 0) throw Error(ErrorCode::EmptyInput, "a session needs at least one candidate tweet");

    AnnotationSession session;
    session.candidates = spec.candidates;
    for (auto& set : session.candidates) {
        std::vector<std::size_t> order(set.ranked_ids.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(spec.seed ^ fnv1a(to_string(set.topic)));
        shuffle(std::span<std::size_t>(order), rng);
        CandidateSet shuffled = set;
        for (std::size_t i = 0; i < order.size(); ++i) {
            shuffled.ranked_ids[i] = set.ranked_ids[order[i]];
            if (order[i] < set.texts.size() && i < shuffled.texts.size()) shuffled.texts[i] = set.texts[order[i]];
        }
        set = std::move(shuffled);
    }
    session.spec = std::move(spec);
    return session;
}

bool toggle_selection(AnnotationSession& session, TopicLabel topic, std::string_view tweet_id) {
    if (session.state == SessionState::Finalized) {
        throw Error(ErrorCode::SessionFinalized,
                    fmt::format("session {} is finalized", session.spec.session_id));
    }
    const auto set = std::find_if(session.candidates.begin(), session.candidates.end(),
                                  [&](const CandidateSet& s) { return s.topic == topic; });
    if (set == session.candidates.end() ||
        std::find(set->ranked_ids.begin(), set->ranked_ids.end(), tweet_id) == set->ranked_ids.end()) {
        throw Error(ErrorCode::UnknownTweet,
                    fmt::format("tweet {} is not a {} candidate", tweet_id, to_string(topic)));
    }
    auto it = std::find_if(session.selections.begin(), session.selections.end(),
                           [&](const auto& s) { return s.second == tweet_id; });
    if (it != session.selections.end()) {
        session.selections.erase(it);
        return false;
    }
    if (session.selections.size() >= session.spec.budget) {
        throw Error(ErrorCode::BudgetExceeded,
                    fmt::format("budget of {} reached: 0 remaining, deselect a tweet first", session.spec.budget));
    }
    session.selections.emplace_back(topic, std::string(tweet_id));
    return true;
}

SummaryRecord finalize(AnnotationSession& session) {
    if (session.state == SessionState::Finalized) {
        throw Error(ErrorCode::SessionFinalized,
                    fmt::format("session {} is already finalized", session.spec.session_id));
    }
    const std::size_t selected = session.selections.size();
    const bool strict = session.spec.mode == SessionMode::GroundTruth && !session.spec.allow_short;
    if (strict && selected < session.spec.budget) {
        throw Error(ErrorCode::UnderBudget, fmt::format("{} below budget", session.spec.budget - selected));
    }
    if (selected == 0) throw Error(ErrorCode::UnderBudget, "select at least one tweet before finalizing");

    SummaryRecord summary;
    summary.method = "human:" + session.spec.annotator_id;
    summary.dataset = session.spec.dataset;
    summary.budget = static_cast<int>(session.spec.budget);
    for (const auto& [topic, id] : session.selections) summary.tweet_ids.push_back(id);
    session.state = SessionState::Finalized;
    session.summary = summary;
    return summary;
}

namespace {

json candidates_json(const std::vector<CandidateSet>& sets) {
    json out = json::array();
    for (const auto& set : sets) {
        json tweets = json::array();
        for (std::size_t i = 0; i < set.ranked_ids.size(); ++i) {
            tweets.push_back({{"id", set.ranked_ids[i]}, {"text", i < set.texts.size() ? set.texts[i] : ""}});
        }
        out.push_back({{"topic", to_string(set.topic)}, {"source_size", set.source_size}, {"tweets", tweets}});
    }
    return out;
}

}  // namespace

json session_to_json(const AnnotationSession& session) {
    json selections = json::object();
    for (const auto& [topic, ids] : session.selections_by_topic()) selections[std::string(to_string(topic))] = ids;
    json order = json::array();
    for (const auto& [topic, id] : session.selections) order.push_back(id);
    json out = {{"session_id", session.spec.session_id},
                {"dataset", session.spec.dataset},
                {"annotator_id", session.spec.annotator_id},
                {"mode", to_string(session.spec.mode)},
                {"budget", session.spec.budget},
                {"seed", session.spec.seed},
                {"allow_short", session.spec.allow_short},
                {"state", to_string(session.state)},
                {"candidates", candidates_json(session.candidates)},
                {"selections", selections},
                {"selection_order", order},
                {"selected", session.selected_count()},
                {"remaining", session.remaining()}};
    if (session.summary) out["summary"] = json::parse(summary_to_json(*session.summary));
    return out;
}

void validate_rating(const Rating& rating) {
    auto check = [](std::string_view name, double value, double lo, double hi) {
        if (!(value >= lo && value <= hi)) {
            throw Error(ErrorCode::InvalidRating, fmt::format("{} {} is outside [{}, {}]", name, value, lo, hi));
        }
    };
    if (rating.rater_id.empty()) throw Error(ErrorCode::InvalidRating, "a rating needs a rater id");
    check("coverage", rating.coverage, 1.0, 5.0);
    check("relevance", rating.relevance, 1.0, 5.0);
    check("diversity", rating.diversity, 1.0, 5.0);
    if (rating.qa_score) check("qa_score", *rating.qa_score, 1.0, 10.0);
}

json rating_to_json(const Rating& rating) {
    json out = {{"rater_id", rating.rater_id},
                {"session_id", rating.session_id},
                {"coverage", rating.coverage},
                {"relevance", rating.relevance},
                {"diversity", rating.diversity}};
    if (rating.qa_score) out["qa_score"] = *rating.qa_score;
    return out;
}

Rating rating_from_json(const json& in) {
    try {
        Rating rating;
        rating.rater_id = in.at("rater_id").get<std::string>();
        rating.session_id = in.value("session_id", "");
        rating.coverage = in.at("coverage").get<double>();
        rating.relevance = in.at("relevance").get<double>();
        rating.diversity = in.at("diversity").get<double>();
        if (in.contains("qa_score") && !in["qa_score"].is_null()) rating.qa_score = in["qa_score"].get<double>();
        return rating;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidRating, fmt::format("malformed rating: {}", e.what()));
    }
}

std::size_t qa_sample_size(std::size_t n) {
    if (n == 0) return 0;
    return std::max<std::size_t>(1, (2 * n + 99) / 100);
}

QualitySample qa_sample(const TopicAssignment& assignment, std::uint64_t seed) {
    QualitySample sample;
    for (const auto& [topic, ids] : assignment.buckets) {
        if (topic == TopicLabel::Irrelevant || ids.empty()) continue;
        std::vector<std::size_t> order(ids.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(seed ^ fnv1a(to_string(topic)));
        shuffle(std::span<std::size_t>(order), rng);
        order.resize(qa_sample_size(ids.size()));
        std::sort(order.begin(), order.end());
        auto& out = sample.tweets[topic];
        for (std::size_t i : order) out.push_back(ids[i]);
    }
    return sample;
}

QaVerdict qa_verdict(std::string annotator_id, const std::vector<Rating>& ratings) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& rating : ratings) {
        if (!rating.qa_score) continue;
        sum += *rating.qa_score;
        ++count;
    }
    if (count == 0) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("annotator {} has no QA scores", annotator_id));
    }
    QaVerdict verdict;
    verdict.annotator_id = std::move(annotator_id);
    verdict.mean_qa = sum / static_cast<double>(count);
    verdict.passed = verdict.mean_qa > 7.0;
    return verdict;
}

std::vector<QaVerdict> rank_annotators(std::vector<QaVerdict> verdicts, std::size_t top) {
    std::erase_if(verdicts, [](const QaVerdict& v) { return !v.passed; });
    std::sort(verdicts.begin(), verdicts.end(), [](const QaVerdict& a, const QaVerdict& b) {
        if (a.mean_qa != b.mean_qa) return a.mean_qa > b.mean_qa;
        return a.annotator_id < b.annotator_id;
    });
    if (verdicts.size() > top) verdicts.resize(top);
    return verdicts;
}

AggregateRating aggregate_ratings(const std::vector<Rating>& ratings) {
    if (ratings.empty()) throw Error(ErrorCode::EmptyInput, "no ratings to aggregate");
    AggregateRating out;
    for (const auto& r : ratings) {
        out.coverage += r.coverage;
        out.relevance += r.relevance;
        out.diversity += r.diversity;
    }
    const double n = static_cast<double>(ratings.size());
    auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
    out.coverage = round2(out.coverage / n);
    out.relevance = round2(out.relevance / n);
    out.diversity = round2(out.diversity / n);
    out.count = ratings.size();
    return out;
}

}  // namespace crisisgt
