#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crisisgt/corpus.hpp"

namespace crisisgt {

using TermId = std::uint32_t;

/// Sparse vector with entries sorted by term id.
struct SparseVector {
    std::vector<std::pair<TermId, double>> entries;

    double dot(const SparseVector& other) const;
    double squared_norm() const;
    double get(TermId term) const;
};

/// dot / sqrt(|a|^2 |b|^2); zero when either vector is zero.
double cosine(const SparseVector& a, const SparseVector& b);

// TF-IDF view of a normalized dataset. idf(t) = ln(N / df(t)). Immutable
// after construction.
class TermIndex {
public:
    /// Throws Error(EmptyInput) for a dataset without tweets.
    static TermIndex build(const Dataset& dataset);

    std::size_t size() const { return ids_.size(); }
    std::size_t vocabulary_size() const { return terms_.size(); }

    std::optional<TermId> term_id(std::string_view term) const;
    const std::string& term(TermId id) const { return terms_[id]; }
    std::size_t df(TermId id) const { return df_[id]; }
    double idf(TermId id) const { return idf_[id]; }
    std::optional<double> idf(std::string_view term) const;

    const std::vector<std::string>& ids() const { return ids_; }
    std::optional<std::size_t> position(std::string_view tweet_id) const;

    /// Raw term counts of the tweet at position i.
    const SparseVector& counts(std::size_t i) const { return counts_[i]; }
    /// tf * idf weights of the tweet at position i.
    const SparseVector& weights(std::size_t i) const { return weights_[i]; }
    double tfidf(std::size_t i, TermId term) const { return weights_[i].get(term); }

    double cosine(std::size_t a, std::size_t b) const;

    /// Copy with every TF-IDF weight multiplied by factor (> 0).
    TermIndex scaled(double factor) const;

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> positions_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::vector<std::size_t> df_;
    std::vector<double> idf_;
    std::vector<SparseVector> counts_;
    std::vector<SparseVector> weights_;
    std::vector<double> squared_norms_;
};

inline TermIndex tfidf_index(const Dataset& dataset) { return TermIndex::build(dataset); }

}  // namespace crisisgt
