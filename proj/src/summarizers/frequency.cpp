#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "summarizers/internal.hpp"

namespace crisisgt::detail {

namespace {

constexpr std::size_t kLuhnGap = 4;
constexpr double kLuhnTopShare = 0.1;

bool is_numeral(const std::string& token) {
    bool digit = false;
    for (char c : token) {
        if (c >= '0' && c <= '9') {
            digit = true;
        } else if (c != '.' && c != ',') {
            return false;
        }
    }
    return digit;
}

}  // namespace

Positions top_k(const std::vector<double>& scores, std::size_t k) {
    Positions order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(std::min(k, order.size()));
    return order;
}

Positions luhn(const Dataset& dataset, const TermIndex& index, std::size_t k) {
    const std::size_t vocab = index.vocabulary_size();
    if (vocab == 0) return top_k(std::vector<double>(dataset.tweets.size(), 0.0), k);
    std::vector<double> freq(vocab, 0.0);
    for (std::size_t i = 0; i < index.size(); ++i) {
        for (const auto& [term, count] : index.counts(i).entries) freq[term] += count;
    }
    std::vector<double> sorted = freq;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto rank = static_cast<std::size_t>(std::ceil(kLuhnTopShare * static_cast<double>(vocab)));
    double cutoff = std::max(2.0, sorted[std::max<std::size_t>(rank, 1) - 1]);
    if (sorted.front() < 2.0) cutoff = sorted.front();

    std::vector<double> scores(dataset.tweets.size(), 0.0);
    for (std::size_t i = 0; i < dataset.tweets.size(); ++i) {
        const auto& tokens = dataset.tweets[i].tokens;
        std::vector<std::size_t> hits;
        for (std::size_t p = 0; p < tokens.size(); ++p) {
            const auto id = index.term_id(tokens[p]);
            if (id && freq[*id] >= cutoff) hits.push_back(p);
        }
        // Clusters of significant words separated by at most kLuhnGap others.
        std::size_t start = 0;
        for (std::size_t h = 0; h < hits.size(); ++h) {
            const bool last = h + 1 == hits.size() || hits[h + 1] - hits[h] - 1 > kLuhnGap;
            if (!last) continue;
            const double significant = static_cast<double>(h - start + 1);
            const double span = static_cast<double>(hits[h] - hits[start] + 1);
            scores[i] = std::max(scores[i], significant * significant / span);
            start = h + 1;
        }
    }
    return top_k(scores, k);
}

Positions sumbasic(const Dataset& dataset, const TermIndex& index, std::size_t k) {
    std::map<std::string, double> prob;
    double total = 0.0;
    for (const auto& tweet : dataset.tweets) {
        for (const auto& token : tweet.tokens) prob[token] += 1.0;
        total += static_cast<double>(tweet.tokens.size());
    }
    if (total > 0.0) {
        for (auto& [word, p] : prob) p /= total;
    }
    (void)index;

    const std::size_t n = dataset.tweets.size();
    std::vector<bool> taken(n, false);
    Positions picked;
    while (picked.size() < k) {
        // Highest-probability word still present in an unselected tweet.
        std::optional<std::string> top_word;
        double top_p = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            for (const auto& token : dataset.tweets[i].tokens) {
                const double p = prob[token];
                if (p > top_p || (p == top_p && token < *top_word)) {
                    top_p = p;
                    top_word = token;
                }
            }
        }
        std::optional<std::size_t> best;
        double best_score = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const auto& tokens = dataset.tweets[i].tokens;
            if (top_word && std::find(tokens.begin(), tokens.end(), *top_word) == tokens.end()) continue;
            double score = 0.0;
            for (const auto& token : tokens) score += prob[token];
            if (!tokens.empty()) score /= static_cast<double>(tokens.size());
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        taken[*best] = true;
        picked.push_back(*best);
        for (const auto& word : std::set<std::string>(dataset.tweets[*best].tokens.begin(),
                                                      dataset.tweets[*best].tokens.end())) {
            prob[word] *= prob[word];
        }
    }
    return picked;
}

Positions cowts(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options) {
    const std::size_t n = dataset.tweets.size();
    auto is_content = [&](const std::string& token) {
        if (is_numeral(token)) return true;
        if (options.cowts_pos_lexicon) return options.cowts_pos_lexicon->count(token) > 0;
        return token.size() >= 3;
    };
    // Content words per tweet with document-frequency weights.
    std::vector<std::vector<TermId>> content(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [term, count] : index.counts(i).entries) {
            if (is_content(index.term(term))) content[i].push_back(term);
        }
    }
    std::vector<bool> covered(index.vocabulary_size(), false);
    std::vector<bool> taken(n, false);
    Positions picked;
    while (picked.size() < k) {
        std::optional<std::size_t> best;
        double best_gain = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double gain = 0.0;
            for (TermId term : content[i]) {
                if (!covered[term]) gain += static_cast<double>(index.df(term));
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        if (!best) {
            // Every content word is covered: start a new covering round, or
            // take tweets without content words in dataset order.
            if (std::any_of(covered.begin(), covered.end(), [](bool c) { return c; })) {
                std::fill(covered.begin(), covered.end(), false);
                continue;
            }
            for (std::size_t i = 0; i < n && picked.size() < k; ++i) {
                if (!taken[i]) {
                    taken[i] = true;
                    picked.push_back(i);
                }
            }
            break;
        }
        taken[*best] = true;
        picked.push_back(*best);
        for (TermId term : content[*best]) covered[term] = true;
    }
    return picked;
}

}  // namespace crisisgt::detail
