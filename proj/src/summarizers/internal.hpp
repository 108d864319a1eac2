#pragma once

#include <cstddef>
#include <vector>

#include "crisisgt/summarizers.hpp"

namespace crisisgt::detail {

// Each selector returns dataset positions, at most k of them, in selection
// order. k never exceeds the dataset size.
using Positions = std::vector<std::size_t>;

Positions luhn(const Dataset& dataset, const TermIndex& index, std::size_t k);
Positions sumbasic(const Dataset& dataset, const TermIndex& index, std::size_t k);
Positions cowts(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options);
Positions lexrank(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options);
Positions clusterrank(const Dataset& dataset, const TermIndex& index, std::size_t k,
                      const SummarizerOptions& options);
Positions lsa(const Dataset& dataset, const TermIndex& index, std::size_t k);
Positions mead(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options);
Positions ontodsumm(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options);
Positions random_pick(const Dataset& dataset, std::size_t k, const SummarizerOptions& options);

/// Positions of the k largest scores, ties by position.
Positions top_k(const std::vector<double>& scores, std::size_t k);

/// ceil(budget / 4), at least 1, at most n.
std::size_t cluster_count(std::size_t budget, std::size_t n);

/// Row i of the index as a unit-length dense vector of vocabulary size.
std::vector<double> dense_unit_row(const TermIndex& index, std::size_t i);

}  // namespace crisisgt::detail
