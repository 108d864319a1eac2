#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"
#include "crisisgt/random.hpp"
#include "crisisgt/ranker.hpp"
#include "summarizers/internal.hpp"

namespace crisisgt {

namespace {

struct MethodName {
    Method method;
    std::string_view name;
};

constexpr MethodName kMethodNames[] = {
    {Method::Luhn, "luhn"},
    {Method::SumBasic, "sumbasic"},
    {Method::Cowts, "cowts"},
    {Method::LexRank, "lexrank"},
    {Method::ClusterRank, "clusterrank"},
    {Method::Lsa, "lsa"},
    {Method::Mead, "mead"},
    {Method::OntoDSummLite, "ontodsumm_lite"},
    {Method::EnsumLite, "ensum_lite"},
    {Method::Random, "random"},
};

}  // namespace

std::string_view to_string(Method method) {
    for (const auto& entry : kMethodNames) {
        if (entry.method == method) return entry.name;
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (const auto& entry : kMethodNames) {
        if (entry.name == text) return entry.method;
    }
    throw Error(ErrorCode::UnknownMethod, fmt::format("unknown summarization method \"{}\"", text));
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = [] {
        std::vector<Method> out;
        for (const auto& entry : kMethodNames) out.push_back(entry.method);
        return out;
    }();
    return methods;
}

const std::vector<Method>& default_ensemble_pool() {
    static const std::vector<Method> pool = {Method::Luhn,        Method::SumBasic, Method::Cowts,
                                             Method::LexRank,     Method::ClusterRank, Method::Lsa,
                                             Method::Mead,        Method::OntoDSummLite};
    return pool;
}

std::vector<std::string> reciprocal_rank_fusion(const std::vector<std::vector<std::string>>& rankings,
                                                const Dataset& dataset, std::size_t budget, double k) {
    std::unordered_map<std::string, double> score;
    for (const auto& ranking : rankings) {
        for (std::size_t r = 0; r < ranking.size(); ++r) score[ranking[r]] += 1.0 / (k + static_cast<double>(r + 1));
    }
    std::vector<std::pair<std::string, double>> fused;
    for (const Tweet& tweet : dataset.tweets) {
        auto it = score.find(tweet.id);
        if (it != score.end()) fused.emplace_back(tweet.id, it->second);
    }
    std::stable_sort(fused.begin(), fused.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < fused.size() && i < budget; ++i) out.push_back(fused[i].first);
    return out;
}

std::map<TopicLabel, std::size_t> allocate_budget(const std::map<TopicLabel, std::size_t>& sizes,
                                                  std::size_t budget) {
    std::map<TopicLabel, std::size_t> alloc;
    std::vector<std::pair<TopicLabel, std::size_t>> topics;
    std::size_t total = 0;
    for (const auto& [topic, size] : sizes) {
        if (size == 0) continue;
        topics.emplace_back(topic, size);
        total += size;
    }
    budget = std::min(budget, total);
    if (budget == 0) return alloc;
    // Larger topics first; std::map order breaks ties.
    std::stable_sort(topics.begin(), topics.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (budget < topics.size()) {
        for (std::size_t i = 0; i < budget; ++i) alloc[topics[i].first] = 1;
        return alloc;
    }
    for (const auto& [topic, size] : topics) alloc[topic] = 1;
    std::size_t left = budget - topics.size();
    // Largest remainder over the capacity each topic has beyond its first tweet.
    while (left > 0) {
        std::size_t capacity = 0;
        for (const auto& [topic, size] : topics) capacity += size - alloc[topic];
        std::vector<std::pair<TopicLabel, double>> remainders;
        std::size_t given = 0;
        for (const auto& [topic, size] : topics) {
            const std::size_t room = size - alloc[topic];
            const double quota = static_cast<double>(left) * static_cast<double>(room) / static_cast<double>(capacity);
            const auto whole = std::min(room, static_cast<std::size_t>(std::floor(quota)));
            alloc[topic] += whole;
            given += whole;
            if (alloc[topic] < size) remainders.emplace_back(topic, quota - std::floor(quota));
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        left -= given;
        for (std::size_t i = 0; i < remainders.size() && left > 0 && given == 0; ++i) {
            ++alloc[remainders[i].first];
            --left;
        }
        if (given == 0 && remainders.empty()) break;
    }
    return alloc;
}

namespace detail {

Positions random_pick(const Dataset& dataset, std::size_t k, const SummarizerOptions& options) {
    Positions all(dataset.tweets.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Rng rng(options.seed);
    shuffle(std::span<std::size_t>(all), rng);
    all.resize(k);
    return all;
}

Positions ontodsumm(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options) {
    const Normalizer normalizer(NormalizerConfig::defaults(), dataset.disaster_keywords.empty()
                                                                   ? default_disaster_keywords()
                                                                   : dataset.disaster_keywords);
    const TopicLexicon seeds = options.lexicon ? *options.lexicon : default_lexicon(normalizer);
    const std::unordered_set<std::string>& keywords =
        options.keyword_terms.empty() ? normalizer.normalized_keywords() : options.keyword_terms;
    const double threshold = options.threshold.value_or(default_threshold(seeds));

    const TopicLexicon lexicon = options.expansion_k == 0
                                     ? seeds
                                     : expand_lexicon(dataset, seeds, options.expansion_k, threshold);
    const TopicAssignment assignment = classify(dataset, lexicon, threshold);

    std::map<TopicLabel, std::size_t> sizes;
    for (const auto& [topic, ids] : assignment.buckets) sizes[topic] = ids.size();
    const auto alloc = allocate_budget(sizes, k);
    if (assignment.classified_count() < k) {
        spdlog::warn("ontodsumm_lite: only {} tweets are classified, summary is short of {}",
                     assignment.classified_count(), k);
    }

    DmmrParams params;
    params.lambda = options.lambda;
    Positions picked;
    for (const auto& [topic, quota] : alloc) {
        std::vector<const Tweet*> bucket;
        for (const auto& id : assignment.buckets.at(topic)) bucket.push_back(&dataset.tweets[*index.position(id)]);
        for (const auto& ranked : dmmr_rank(bucket, index, lexicon, topic, keywords, params, quota)) {
            picked.push_back(*index.position(ranked.id));
        }
    }
    return picked;
}

}  // namespace detail

SummaryRecord summarize(Method method, const Dataset& dataset, std::size_t budget, const SummarizerOptions& options) {
    if (budget == 0) throw Error(ErrorCode::InvalidArgument, "summary budget must be at least 1");
    if (dataset.tweets.empty()) throw Error(ErrorCode::EmptyInput, fmt::format("dataset {} is empty", dataset.name));
    std::size_t k = budget;
    if (budget > dataset.tweets.size()) {
        spdlog::warn("budget {} exceeds the {} tweets of {}; selecting all of them", budget, dataset.tweets.size(),
                     dataset.name);
        k = dataset.tweets.size();
    }

    SummaryRecord record;
    record.method = std::string(to_string(method));
    record.dataset = dataset.name;
    record.budget = static_cast<int>(budget);

    if (method == Method::EnsumLite) {
        if (options.ensemble_pool.empty()) throw Error(ErrorCode::InvalidArgument, "ensum_lite needs a method pool");
        std::vector<std::vector<std::string>> rankings;
        for (Method member : options.ensemble_pool) {
            if (member == Method::EnsumLite) {
                throw Error(ErrorCode::InvalidArgument, "ensum_lite cannot fuse itself");
            }
            rankings.push_back(summarize(member, dataset, k, options).tweet_ids);
        }
        record.tweet_ids = reciprocal_rank_fusion(rankings, dataset, k, options.rrf_k);
        return record;
    }

    const TermIndex index = tfidf_index(dataset);
    detail::Positions picked;
    switch (method) {
        case Method::Luhn: picked = detail::luhn(dataset, index, k); break;
        case Method::SumBasic: picked = detail::sumbasic(dataset, index, k); break;
        case Method::Cowts: picked = detail::cowts(dataset, index, k, options); break;
        case Method::LexRank: picked = detail::lexrank(dataset, index, k, options); break;
        case Method::ClusterRank: picked = detail::clusterrank(dataset, index, k, options); break;
        case Method::Lsa: picked = detail::lsa(dataset, index, k); break;
        case Method::Mead: picked = detail::mead(dataset, index, k, options); break;
        case Method::OntoDSummLite: picked = detail::ontodsumm(dataset, index, k, options); break;
        case Method::Random: picked = detail::random_pick(dataset, k, options); break;
        case Method::EnsumLite: break;
    }
    for (std::size_t pos : picked) record.tweet_ids.push_back(dataset.tweets[pos].id);
    return record;
}

}  // namespace crisisgt
