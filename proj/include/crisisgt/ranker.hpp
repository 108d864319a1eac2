#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crisisgt/corpus.hpp"
#include "crisisgt/embeddings.hpp"
#include "crisisgt/taxonomy.hpp"
#include "crisisgt/term_index.hpp"

namespace crisisgt {

enum class SimilarityKind { TfidfCosine, EmbeddingCosine };

std::string_view to_string(SimilarityKind kind);
std::optional<SimilarityKind> parse_similarity(std::string_view text);

struct DmmrParams {
    double lambda = 0.7;
    SimilarityKind sim = SimilarityKind::TfidfCosine;
    /// Required for EmbeddingCosine; not owned.
    const EmbeddingTable* embeddings = nullptr;

    void validate() const;
};

struct RankedTweet {
    std::string id;
    double rel = 0.0;
    /// Objective value at the step this tweet was selected.
    double mmr = 0.0;
};

/// Orders tweet ids first by numeric value when both are digit strings,
/// otherwise lexicographically.
bool id_less(std::string_view a, std::string_view b);

/// Relevance of each bucket tweet: summed TF-IDF weight of its terms that are
/// topic-lexicon terms or keyword_terms, divided by the bucket maximum.
std::vector<double> dmmr_relevance(const std::vector<const Tweet*>& bucket, const TermIndex& index,
                                   const TopicLexicon& lexicon, TopicLabel topic,
                                   const std::unordered_set<std::string>& keyword_terms);

/// Greedy MMR: each step takes argmax of lambda*rel - (1-lambda)*max sim to
/// the tweets already taken (the first step uses rel alone). Ties go to the
/// smaller id. Every bucket tweet must be present in the index.
std::vector<RankedTweet> dmmr_rank(const std::vector<const Tweet*>& bucket, const TermIndex& index,
                                   const TopicLexicon& lexicon, TopicLabel topic,
                                   const std::unordered_set<std::string>& keyword_terms,
                                   const DmmrParams& params,
                                   std::optional<std::size_t> limit = std::nullopt);

/// n when n <= 25, otherwise max(25, ceil(n / 4)).
std::size_t shortlist_size(std::size_t n);

struct CandidateSet {
    TopicLabel topic = TopicLabel::Irrelevant;
    std::vector<std::string> ranked_ids;
    /// Raw text per ranked id, same order; empty when unknown.
    std::vector<std::string> texts;
    std::size_t source_size = 0;
};

struct CandidateReport {
    std::vector<CandidateSet> sets;
    std::size_t shortlisted = 0;
    std::size_t classified = 0;

    double fraction() const;
};

CandidateReport build_candidates(const Dataset& dataset, const TopicAssignment& assignment,
                                 const TermIndex& index, const TopicLexicon& lexicon,
                                 const std::unordered_set<std::string>& keyword_terms,
                                 const DmmrParams& params);

/// [{topic, source_size, tweets: [{id, text}]}]. Carries no scores.
std::string candidates_to_json(const std::vector<CandidateSet>& sets);
std::vector<CandidateSet> candidates_from_json(std::string_view json_text);

}  // namespace crisisgt
