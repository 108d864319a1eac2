#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crisisgt/corpus.hpp"
#include "crisisgt/term_index.hpp"
#include "crisisgt/topic.hpp"

namespace crisisgt {

struct TopicTerms {
    std::set<std::string> seeds;
    /// Weight of every term of the topic, seeds and expansion terms alike.
    std::map<std::string, double> weights;
};

// Weighted term lexicon per topic. Terms are stored in normalized form so
// they compare equal to Tweet::tokens. Weights lie in (0, 1].
class TopicLexicon {
public:
    void add_seed(TopicLabel topic, const std::string& term, double weight = 1.0);
    void add_term(TopicLabel topic, const std::string& term, double weight);

    const std::map<TopicLabel, TopicTerms>& topics() const { return topics_; }
    const TopicTerms* terms(TopicLabel topic) const;
    /// Zero when the term is not part of the topic.
    double weight(TopicLabel topic, std::string_view term) const;
    bool contains(std::string_view term) const;
    bool empty() const;
    double max_seed_weight() const;

    /// Throws Error(InvalidArgument) when a topic lacks seeds, Irrelevant has
    /// terms, or a weight falls outside (0, 1].
    void validate() const;

private:
    std::map<TopicLabel, TopicTerms> topics_;
};

/// Lexicon JSON: {"Topic": {"seeds": [..], "weights": {"term": w}}}. Raw
/// terms are mapped through the normalizer; terms it rejects are skipped.
TopicLexicon parse_lexicon(std::string_view json_text, const Normalizer& normalizer);
TopicLexicon load_lexicon(const std::filesystem::path& path, const Normalizer& normalizer);
/// Bundled seed lexicon (data/lexicon.json).
TopicLexicon default_lexicon(const Normalizer& normalizer);
std::string lexicon_to_json(const TopicLexicon& lexicon);

/// Half of the largest seed weight.
double default_threshold(const TopicLexicon& lexicon);

struct TopicAssignment {
    /// Tweet ids per topic in dataset order. Only non-empty buckets present.
    std::map<TopicLabel, std::vector<std::string>> buckets;
    std::vector<std::string> dropped;

    std::optional<TopicLabel> topic_of(std::string_view id) const;
    std::size_t classified_count() const;
};

/// Sum of the weights of distinct lexicon terms in the tokens, per topic.
std::map<TopicLabel, double> topic_scores(const std::vector<std::string>& tokens,
                                          const TopicLexicon& lexicon);

/// Highest-scoring topic per tweet, ties resolved by TopicLabel order; tweets
/// scoring below threshold are dropped. Throws on an empty lexicon.
TopicAssignment classify(const Dataset& dataset, const TopicLexicon& lexicon, double threshold);

/// One round of pseudo-relevance feedback: for each topic, the k terms with
/// the highest summed TF-IDF over the tweets classified into it (and not yet
/// in the lexicon) are added with weight = score / best score. Seeds are
/// kept. k == 0 returns the lexicon unchanged with a warning.
TopicLexicon expand_lexicon(const Dataset& dataset, const TopicLexicon& lexicon, std::size_t k,
                            std::optional<double> threshold = std::nullopt);

/// Counts per topic; topics without tweets are absent.
std::map<TopicLabel, std::size_t> topic_histogram(const TopicAssignment& assignment);

/// Copies the assigned topic onto each tweet.
void apply_assignment(Dataset& dataset, const TopicAssignment& assignment);

std::string assignment_to_json(const TopicAssignment& assignment);
TopicAssignment assignment_from_json(std::string_view json_text);

}  // namespace crisisgt
