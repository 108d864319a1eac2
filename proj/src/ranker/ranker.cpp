#include "crisisgt/ranker.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"
#include "json.hpp"

namespace crisisgt {

using nlohmann::json;

std::string_view to_string(SimilarityKind kind) {
    return kind == SimilarityKind::TfidfCosine ? "tfidf" : "embedding";
}

std::optional<SimilarityKind> parse_similarity(std::string_view text) {
    if (text == "tfidf" || text == "tfidf_cosine") return SimilarityKind::TfidfCosine;
    if (text == "embedding" || text == "embedding_cosine") return SimilarityKind::EmbeddingCosine;
    return std::nullopt;
}

void DmmrParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("lambda {} is outside [0, 1]", lambda));
    }
    if (sim == SimilarityKind::EmbeddingCosine && embeddings == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "embedding similarity needs an embedding table");
    }
}

bool id_less(std::string_view a, std::string_view b) {
    auto numeric = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (numeric(a) && numeric(b)) {
        const auto trim = [](std::string_view s) {
            const auto first = s.find_first_not_of('0');
            return first == std::string_view::npos ? std::string_view("0") : s.substr(first);
        };
        const auto ta = trim(a);
        const auto tb = trim(b);
        if (ta.size() != tb.size()) return ta.size() < tb.size();
        if (ta != tb) return ta < tb;
    }
    return a < b;
}

namespace {

std::vector<std::size_t> positions_of(const std::vector<const Tweet*>& bucket, const TermIndex& index) {
    std::vector<std::size_t> positions;
    positions.reserve(bucket.size());
    for (const Tweet* tweet : bucket) {
        const auto pos = index.position(tweet->id);
        if (!pos) {
            throw Error(ErrorCode::UnknownTweet, fmt::format("tweet {} is not in the term index", tweet->id));
        }
        positions.push_back(*pos);
    }
    return positions;
}

}  // namespace

std::vector<double> dmmr_relevance(const std::vector<const Tweet*>& bucket, const TermIndex& index,
                                   const TopicLexicon& lexicon, TopicLabel topic,
                                   const std::unordered_set<std::string>& keyword_terms) {
    const auto positions = positions_of(bucket, index);
    const TopicTerms* terms = lexicon.terms(topic);
    std::vector<double> rel(bucket.size(), 0.0);
    double top = 0.0;
    for (std::size_t i = 0; i < bucket.size(); ++i) {
        for (const auto& [term, weight] : index.weights(positions[i]).entries) {
            const std::string& text = index.term(term);
            if ((terms != nullptr && terms->weights.count(text) > 0) || keyword_terms.count(text) > 0) {
                rel[i] += weight;
            }
        }
        top = std::max(top, rel[i]);
    }
    if (top > 0.0) {
        for (double& r : rel) r /= top;
    }
    return rel;
}

std::vector<RankedTweet> dmmr_rank(const std::vector<const Tweet*>& bucket, const TermIndex& index,
                                   const TopicLexicon& lexicon, TopicLabel topic,
                                   const std::unordered_set<std::string>& keyword_terms,
                                   const DmmrParams& params, std::optional<std::size_t> limit) {
    params.validate();
    if (bucket.empty()) {
        throw Error(ErrorCode::EmptyInput, fmt::format("topic {} has no tweets to rank", to_string(topic)));
    }
    const auto positions = positions_of(bucket, index);
    const auto rel = dmmr_relevance(bucket, index, lexicon, topic, keyword_terms);
    const std::size_t n = bucket.size();

    std::vector<std::vector<double>> vectors;
    if (params.sim == SimilarityKind::EmbeddingCosine) {
        for (const Tweet* tweet : bucket) vectors.push_back(params.embeddings->mean(tweet->tokens));
    }
    auto sim = [&](std::size_t a, std::size_t b) {
        if (params.sim == SimilarityKind::EmbeddingCosine) return dense_cosine(vectors[a], vectors[b]);
        return index.cosine(positions[a], positions[b]);
    };

    const std::size_t take = std::min(n, limit.value_or(n));
    std::vector<RankedTweet> ranked;
    ranked.reserve(take);
    std::vector<bool> selected(n, false);
    // Running max similarity of each tweet to the selected set.
    std::vector<double> max_sim(n, -std::numeric_limits<double>::infinity());
    for (std::size_t step = 0; step < take; ++step) {
        std::optional<std::size_t> best;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (selected[i]) continue;
            const double penalty = step == 0 ? 0.0 : max_sim[i];
            const double score = params.lambda * rel[i] - (1.0 - params.lambda) * penalty;
            if (!best || score > best_score ||
                (score == best_score && id_less(bucket[i]->id, bucket[*best]->id))) {
                best = i;
                best_score = score;
            }
        }
        selected[*best] = true;
        ranked.push_back({bucket[*best]->id, rel[*best], best_score});
        for (std::size_t i = 0; i < n; ++i) {
            if (!selected[i]) max_sim[i] = std::max(max_sim[i], sim(i, *best));
        }
    }
    return ranked;
}

std::size_t shortlist_size(std::size_t n) {
    if (n <= 25) return n;
    return std::max<std::size_t>(25, (n + 3) / 4);
}

double CandidateReport::fraction() const {
    return classified == 0 ? 0.0 : static_cast<double>(shortlisted) / static_cast<double>(classified);
}

CandidateReport build_candidates(const Dataset& dataset, const TopicAssignment& assignment,
                                 const TermIndex& index, const TopicLexicon& lexicon,
                                 const std::unordered_set<std::string>& keyword_terms,
                                 const DmmrParams& params) {
    if (assignment.classified_count() == 0) {
        throw Error(ErrorCode::EmptyInput, "no classified tweets to build candidates from");
    }
    CandidateReport report;
    for (const auto& [topic, ids] : assignment.buckets) {
        if (topic == TopicLabel::Irrelevant || ids.empty()) continue;
        std::vector<const Tweet*> bucket;
        for (const auto& id : ids) {
            const Tweet* tweet = dataset.find(id);
            if (tweet == nullptr) {
                throw Error(ErrorCode::UnknownTweet, fmt::format("assigned tweet {} is not in the dataset", id));
            }
            bucket.push_back(tweet);
        }
        CandidateSet set;
        set.topic = topic;
        set.source_size = bucket.size();
        for (const auto& ranked :
             dmmr_rank(bucket, index, lexicon, topic, keyword_terms, params, shortlist_size(bucket.size()))) {
            set.ranked_ids.push_back(ranked.id);
            set.texts.push_back(dataset.find(ranked.id)->raw_text);
        }
        report.shortlisted += set.ranked_ids.size();
        report.classified += set.source_size;
        report.sets.push_back(std::move(set));
    }
    spdlog::info("candidates: {} of {} classified tweets shortlisted ({:.2f}%)", report.shortlisted,
                 report.classified, 100.0 * report.fraction());
    return report;
}

std::string candidates_to_json(const std::vector<CandidateSet>& sets) {
    json root = json::array();
    for (const auto& set : sets) {
        json tweets = json::array();
        for (std::size_t i = 0; i < set.ranked_ids.size(); ++i) {
            tweets.push_back({{"id", set.ranked_ids[i]}, {"text", i < set.texts.size() ? set.texts[i] : ""}});
        }
        root.push_back({{"topic", to_string(set.topic)}, {"source_size", set.source_size}, {"tweets", tweets}});
    }
    return root.dump(2);
}

std::vector<CandidateSet> candidates_from_json(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, fmt::format("candidates are not valid JSON: {}", e.what()));
    }
    if (!root.is_array()) throw Error(ErrorCode::MalformedRecord, "candidates must be a JSON array");
    std::vector<CandidateSet> sets;
    try {
        for (const auto& entry : root) {
            CandidateSet set;
            const auto name = entry.at("topic").get<std::string>();
            const auto topic = parse_topic(name);
            if (!topic || *topic == TopicLabel::Irrelevant) {
                throw Error(ErrorCode::MalformedRecord, fmt::format("invalid candidate topic \"{}\"", name));
            }
            set.topic = *topic;
            set.source_size = entry.at("source_size").get<std::size_t>();
            for (const auto& tweet : entry.at("tweets")) {
                set.ranked_ids.push_back(tweet.at("id").get<std::string>());
                set.texts.push_back(tweet.value("text", ""));
            }
            sets.push_back(std::move(set));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, fmt::format("malformed candidates: {}", e.what()));
    }
    return sets;
}

}  // namespace crisisgt
