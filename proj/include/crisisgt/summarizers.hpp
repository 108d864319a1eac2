#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "crisisgt/corpus.hpp"
#include "crisisgt/summary_record.hpp"
#include "crisisgt/taxonomy.hpp"
#include "crisisgt/term_index.hpp"

namespace crisisgt {

enum class Method {
    Luhn,
    SumBasic,
    Cowts,
    LexRank,
    ClusterRank,
    Lsa,
    Mead,
    OntoDSummLite,
    EnsumLite,
    /// Seeded uniform selection; a baseline, not part of the ensemble pool.
    Random,
};

std::string_view to_string(Method method);
/// Throws Error(UnknownMethod).
Method parse_method(std::string_view text);
const std::vector<Method>& all_methods();
/// Methods fused by ensum_lite when no pool is given.
const std::vector<Method>& default_ensemble_pool();

struct SummarizerOptions {
    std::uint64_t seed = 0;

    double lexrank_damping = 0.85;
    double lexrank_threshold = 0.1;
    double lexrank_epsilon = 1e-10;
    std::size_t lexrank_max_iterations = 1000;

    /// Optional content-word lexicon for cowts (nouns, main verbs), in
    /// normalized form. Numerals always count.
    std::optional<std::unordered_set<std::string>> cowts_pos_lexicon;

    double mead_redundancy = 0.7;

    /// ontodsumm_lite inputs. Without a lexicon the bundled one is used; an
    /// empty keyword set falls back to the dataset's keywords.
    std::optional<TopicLexicon> lexicon;
    std::optional<double> threshold;
    std::unordered_set<std::string> keyword_terms;
    std::size_t expansion_k = 5;
    double lambda = 0.7;

    std::vector<Method> ensemble_pool = default_ensemble_pool();
    double rrf_k = 60.0;
};

/// Selects at most budget tweets. A budget above the dataset size selects the
/// whole dataset and logs a warning. Deterministic given dataset, method and
/// options (including the seed).
SummaryRecord summarize(Method method, const Dataset& dataset, std::size_t budget,
                        const SummarizerOptions& options = {});

struct SentenceGraph {
    std::vector<std::string> nodes;
    /// Symmetric, values in [0, 1]; the diagonal is ignored.
    std::vector<std::vector<double>> weights;
    double threshold = 0.0;
};

/// TF-IDF cosine between every pair of tweets, zeroed below threshold.
SentenceGraph build_sentence_graph(const Dataset& dataset, const TermIndex& index, double threshold);

struct LexRankResult {
    std::vector<double> scores;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Power iteration on the row-normalized graph with damping; rows without
/// edges spread uniformly. Scores sum to 1. Stops when the largest change is
/// below epsilon or after max_iterations (converged = false).
LexRankResult lexrank_scores(const SentenceGraph& graph, double damping, double epsilon,
                             std::size_t max_iterations = 1000);

/// Cycles through the right singular vectors of the term x tweet TF-IDF
/// matrix by decreasing singular value, each time taking the unselected tweet
/// with the largest absolute component. Throws Error(InvalidArgument) when
/// the matrix is all zero.
SummaryRecord lsa_select(const Dataset& dataset, std::size_t budget);

/// Fuses rankings by sum of 1 / (k + rank), rank starting at 1; ties keep
/// first appearance order in the dataset.
std::vector<std::string> reciprocal_rank_fusion(const std::vector<std::vector<std::string>>& rankings,
                                                const Dataset& dataset, std::size_t budget, double k = 60.0);

/// Per-topic budget: at least one tweet per topic while the budget allows,
/// the rest split by largest remainder in proportion to topic size, never
/// more than a topic holds.
std::map<TopicLabel, std::size_t> allocate_budget(const std::map<TopicLabel, std::size_t>& sizes,
                                                  std::size_t budget);

}  // namespace crisisgt
