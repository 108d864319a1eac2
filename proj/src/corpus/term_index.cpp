#include "crisisgt/term_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "crisisgt/error.hpp"

namespace crisisgt {

double SparseVector::dot(const SparseVector& other) const {
    double sum = 0.0;
    auto a = entries.begin();
    auto b = other.entries.begin();
    while (a != entries.end() && b != other.entries.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            sum += a->second * b->second;
            ++a;
            ++b;
        }
    }
    return sum;
}

double SparseVector::squared_norm() const {
    double sum = 0.0;
    for (const auto& [term, value] : entries) sum += value * value;
    return sum;
}

double SparseVector::get(TermId term) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), term,
                               [](const auto& entry, TermId t) { return entry.first < t; });
    if (it == entries.end() || it->first != term) return 0.0;
    return it->second;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    const double denom = a.squared_norm() * b.squared_norm();
    if (denom <= 0.0) return 0.0;
    return std::clamp(a.dot(b) / std::sqrt(denom), -1.0, 1.0);
}

TermIndex TermIndex::build(const Dataset& dataset) {
    if (dataset.tweets.empty()) {
        throw Error(ErrorCode::EmptyInput, "cannot index an empty dataset");
    }
    TermIndex index;
    const std::size_t n = dataset.tweets.size();
    index.ids_.reserve(n);

    // Term ids follow first appearance so the index is deterministic.
    std::vector<std::map<TermId, double>> counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Tweet& tweet = dataset.tweets[i];
        index.ids_.push_back(tweet.id);
        index.positions_.emplace(tweet.id, i);
        for (const auto& token : tweet.tokens) {
            auto [it, inserted] = index.term_ids_.emplace(token, static_cast<TermId>(index.terms_.size()));
            if (inserted) {
                index.terms_.push_back(token);
                index.df_.push_back(0);
            }
            if (counts[i][it->second]++ == 0.0) ++index.df_[it->second];
        }
    }

    index.idf_.resize(index.terms_.size());
    for (std::size_t t = 0; t < index.terms_.size(); ++t) {
        index.idf_[t] = std::log(static_cast<double>(n) / static_cast<double>(index.df_[t]));
    }

    index.counts_.resize(n);
    index.weights_.resize(n);
    index.squared_norms_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [term, count] : counts[i]) {
            index.counts_[i].entries.emplace_back(term, count);
            index.weights_[i].entries.emplace_back(term, count * index.idf_[term]);
        }
        index.squared_norms_[i] = index.weights_[i].squared_norm();
    }
    return index;
}

std::optional<TermId> TermIndex::term_id(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> TermIndex::idf(std::string_view term) const {
    if (auto id = term_id(term)) return idf_[*id];
    return std::nullopt;
}

std::optional<std::size_t> TermIndex::position(std::string_view tweet_id) const {
    auto it = positions_.find(std::string(tweet_id));
    if (it == positions_.end()) return std::nullopt;
    return it->second;
}

double TermIndex::cosine(std::size_t a, std::size_t b) const {
    const double denom = squared_norms_[a] * squared_norms_[b];
    if (denom <= 0.0) return 0.0;
    return std::clamp(weights_[a].dot(weights_[b]) / std::sqrt(denom), -1.0, 1.0);
}

TermIndex TermIndex::scaled(double factor) const {
    if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
    TermIndex copy = *this;
    for (auto& vector : copy.weights_) {
        for (auto& entry : vector.entries) entry.second *= factor;
    }
    for (std::size_t i = 0; i < copy.weights_.size(); ++i) {
        copy.squared_norms_[i] = copy.weights_[i].squared_norm();
    }
    return copy;
}

}  // namespace crisisgt
