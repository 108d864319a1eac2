#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "crisisgt/corpus.hpp"

namespace crisisgt {

// An extractive summary: ordered, unique tweet ids, at most budget of them.
struct SummaryRecord {
    std::string method;
    std::string dataset;
    std::vector<std::string> tweet_ids;
    int budget = 40;

    bool operator==(const SummaryRecord&) const = default;
};

/// {"method", "dataset", "budget", "tweet_ids"}.
std::string summary_to_json(const SummaryRecord& summary);
SummaryRecord summary_from_json(std::string_view json_text);

/// One raw tweet text per line, in summary order. Line breaks inside a
/// tweet are replaced by spaces.
std::string summary_to_text(const SummaryRecord& summary, const Dataset& dataset);

void write_summary(const SummaryRecord& summary, const std::filesystem::path& path);
SummaryRecord read_summary(const std::filesystem::path& path);

/// Throws Error(InvalidArgument) when the record breaks its invariants with
/// respect to the dataset.
void validate_summary(const SummaryRecord& summary, const Dataset& dataset);

}  // namespace crisisgt
