#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crisisgt/annotation.hpp"
#include "crisisgt/embeddings.hpp"
#include "crisisgt/metrics.hpp"
#include "json.hpp"

namespace crisisgt {

struct ReportInputs {
    const Dataset* dataset = nullptr;
    const TopicAssignment* assignment = nullptr;
    /// Candidate sets, when available, give the shortlist fraction.
    const std::vector<CandidateSet>* candidates = nullptr;
    const EmbeddingTable* embeddings = nullptr;
    std::vector<SummaryRecord> summaries;
    /// Ratings keyed by summary method.
    std::map<std::string, std::vector<Rating>> ratings;
    RougeTokens rouge_tokens = RougeTokens::Normalized;
};

struct SummaryRow {
    std::string method;
    std::size_t size = 0;
    CoverageReport coverage;
    /// Absent when a tweet lacks a relevance label.
    std::optional<RelevanceDistribution> relevance;
    /// Absent without embeddings, explanations, or a second tweet.
    std::optional<DiversityResult> diversity;
    std::optional<AggregateRating> ratings;
};

struct RougeCell {
    std::string system;
    std::string reference;
    RougeScores scores;
};

struct Report {
    std::string dataset;
    std::size_t tweets = 0;
    std::size_t classified = 0;
    std::map<TopicLabel, std::size_t> histogram;
    std::optional<std::size_t> shortlisted;
    std::optional<std::size_t> candidate_source;
    std::vector<SummaryRow> rows;
    /// Every non-human summary scored against every human one.
    std::vector<RougeCell> rouge;

    std::optional<double> candidate_fraction() const;
};

inline bool is_human_method(const std::string& method) { return method.rfind("human:", 0) == 0; }

/// Rows are sorted by method name. Throws when a summary names an unknown
/// tweet or another dataset.
Report build_report(const ReportInputs& inputs);
nlohmann::json report_to_json(const Report& report);
std::string report_to_markdown(const Report& report);

}  // namespace crisisgt
