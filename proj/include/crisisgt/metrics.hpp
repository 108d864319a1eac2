#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crisisgt/corpus.hpp"
#include "crisisgt/embeddings.hpp"
#include "crisisgt/summary_record.hpp"
#include "crisisgt/taxonomy.hpp"

namespace crisisgt {

struct CoverageReport {
    std::size_t topics_present = 0;
    /// Topics with tweets in the assignment but none in the summary.
    std::vector<TopicLabel> missed;
    /// Summary tweets the assignment does not classify.
    std::size_t unclassified = 0;
};

CoverageReport coverage_report(const SummaryRecord& summary, const TopicAssignment& assignment);

struct RelevanceDistribution {
    double high_pct = 0.0;
    double med_pct = 0.0;
    double low_pct = 0.0;
};

/// Percentages over the summary size. Throws when the summary is empty or a
/// tweet has no label.
RelevanceDistribution relevance_distribution(const SummaryRecord& summary,
                                             const std::map<std::string, RelevanceLabel>& labels);
/// Labels taken from the dataset's tweets.
RelevanceDistribution relevance_distribution(const SummaryRecord& summary, const Dataset& dataset);

/// Lowercased ASCII-alphanumeric runs of an explanation.
std::vector<std::string> explanation_tokens(std::string_view explanation);

struct DiversityResult {
    /// Mean over unordered pairs of 1 - cos(mean embedding), within [0, 2].
    double avg = 0.0;
    std::size_t pairs = 0;
    /// Pairs with negative cosine, whose diversity exceeds 1.
    std::size_t obtuse_pairs = 0;
};

/// A vector with no in-vocabulary token is zero and has similarity 0 with
/// everything. Throws Error(InvalidArgument) for fewer than two explanations.
DiversityResult diversity(const std::vector<std::string>& explanations, const EmbeddingTable& table);
/// Explanations of the summary tweets; every tweet must carry one.
DiversityResult diversity(const SummaryRecord& summary, const Dataset& dataset, const EmbeddingTable& table);

struct RougeScores {
    double rouge1_f1 = 0.0;
    double rouge2_f1 = 0.0;
    double rougeL_f1 = 0.0;
};

/// N-gram F1 with clipped counts.
double rouge_n(const std::vector<std::string>& system, const std::vector<std::string>& reference, std::size_t n);
/// F1 of the longest common subsequence over whole sequences.
double rouge_l(const std::vector<std::string>& system, const std::vector<std::string>& reference);
/// Throws Error(EmptyInput) when either side is empty.
RougeScores rouge(const std::vector<std::string>& system, const std::vector<std::string>& reference);

enum class RougeTokens { Normalized, Raw };

/// Raw mode lowercases and splits raw text on non-alphanumerics; normalized
/// mode uses the tweets' pipeline tokens.
std::vector<std::string> summary_tokens(const SummaryRecord& summary, const Dataset& dataset, RougeTokens mode);
std::vector<std::string> text_tokens(std::string_view text, RougeTokens mode, const Normalizer& normalizer);

}  // namespace crisisgt
