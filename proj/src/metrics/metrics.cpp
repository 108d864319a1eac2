#include "crisisgt/metrics.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"

namespace crisisgt {

CoverageReport coverage_report(const SummaryRecord& summary, const TopicAssignment& assignment) {
    std::unordered_map<std::string, TopicLabel> topic_of;
    for (const auto& [topic, ids] : assignment.buckets) {
        for (const auto& id : ids) topic_of.emplace(id, topic);
    }
    std::set<TopicLabel> present;
    CoverageReport report;
    for (const auto& id : summary.tweet_ids) {
        auto it = topic_of.find(id);
        if (it == topic_of.end()) {
            ++report.unclassified;
        } else {
            present.insert(it->second);
        }
    }
    report.topics_present = present.size();
    for (const auto& [topic, ids] : assignment.buckets) {
        if (!ids.empty() && present.count(topic) == 0) report.missed.push_back(topic);
    }
    return report;
}

RelevanceDistribution relevance_distribution(const SummaryRecord& summary,
                                             const std::map<std::string, RelevanceLabel>& labels) {
    if (summary.tweet_ids.empty()) throw Error(ErrorCode::EmptyInput, "relevance distribution of an empty summary");
    std::size_t high = 0, med = 0, low = 0;
    for (const auto& id : summary.tweet_ids) {
        auto it = labels.find(id);
        if (it == labels.end()) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("summary tweet {} has no relevance label", id));
        }
        switch (it->second) {
            case RelevanceLabel::High: ++high; break;
            case RelevanceLabel::Medium: ++med; break;
            case RelevanceLabel::Low: ++low; break;
        }
    }
    const double n = static_cast<double>(summary.tweet_ids.size());
    return {100.0 * high / n, 100.0 * med / n, 100.0 * low / n};
}

RelevanceDistribution relevance_distribution(const SummaryRecord& summary, const Dataset& dataset) {
    std::map<std::string, RelevanceLabel> labels;
    for (const auto& tweet : dataset.tweets) {
        if (tweet.relevance_label) labels.emplace(tweet.id, *tweet.relevance_label);
    }
    return relevance_distribution(summary, labels);
}

std::vector<std::string> explanation_tokens(std::string_view explanation) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : explanation) {
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (alnum) {
            current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

DiversityResult diversity(const std::vector<std::string>& explanations, const EmbeddingTable& table) {
    if (explanations.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "diversity needs at least two explanations");
    }
    std::vector<std::vector<double>> vectors;
    vectors.reserve(explanations.size());
    for (const auto& text : explanations) vectors.push_back(table.mean(explanation_tokens(text)));

    DiversityResult result;
    double sum = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            const double div = 1.0 - dense_cosine(vectors[i], vectors[j]);
            if (div > 1.0) ++result.obtuse_pairs;
            sum += div;
            ++result.pairs;
        }
    }
    result.avg = sum / static_cast<double>(result.pairs);
    if (result.obtuse_pairs > 0) {
        spdlog::warn("diversity: {} of {} pairs have negative cosine (diversity above 1)", result.obtuse_pairs,
                     result.pairs);
    }
    return result;
}

DiversityResult diversity(const SummaryRecord& summary, const Dataset& dataset, const EmbeddingTable& table) {
    std::vector<std::string> explanations;
    for (const auto& id : summary.tweet_ids) {
        const Tweet* tweet = dataset.find(id);
        if (tweet == nullptr) throw Error(ErrorCode::UnknownTweet, fmt::format("unknown tweet {}", id));
        if (!tweet->explanation) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("tweet {} has no explanation", id));
        }
        explanations.push_back(*tweet->explanation);
    }
    return diversity(explanations, table);
}

namespace {

std::map<std::vector<std::string>, std::size_t> ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    std::map<std::vector<std::string>, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    }
    return counts;
}

double f1(double matched, double system_total, double reference_total) {
    if (matched <= 0.0 || system_total <= 0.0 || reference_total <= 0.0) return 0.0;
    const double precision = matched / system_total;
    const double recall = matched / reference_total;
    return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double rouge_n(const std::vector<std::string>& system, const std::vector<std::string>& reference, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "ROUGE-N needs n >= 1");
    const auto sys = ngrams(system, n);
    const auto ref = ngrams(reference, n);
    std::size_t matched = 0, sys_total = 0, ref_total = 0;
    for (const auto& [gram, count] : sys) sys_total += count;
    for (const auto& [gram, count] : ref) {
        ref_total += count;
        auto it = sys.find(gram);
        if (it != sys.end()) matched += std::min(count, it->second);
    }
    return f1(static_cast<double>(matched), static_cast<double>(sys_total), static_cast<double>(ref_total));
}

double rouge_l(const std::vector<std::string>& system, const std::vector<std::string>& reference) {
    const std::size_t m = system.size();
    const std::size_t n = reference.size();
    std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            cur[j] = system[i - 1] == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return f1(static_cast<double>(prev[n]), static_cast<double>(m), static_cast<double>(n));
}

RougeScores rouge(const std::vector<std::string>& system, const std::vector<std::string>& reference) {
    if (system.empty() || reference.empty()) {
        throw Error(ErrorCode::EmptyInput, "ROUGE needs non-empty system and reference token lists");
    }
    return {rouge_n(system, reference, 1), rouge_n(system, reference, 2), rouge_l(system, reference)};
}

std::vector<std::string> text_tokens(std::string_view text, RougeTokens mode, const Normalizer& normalizer) {
    if (mode == RougeTokens::Raw) return explanation_tokens(text);
    return normalizer.tokenize(text);
}

std::vector<std::string> summary_tokens(const SummaryRecord& summary, const Dataset& dataset, RougeTokens mode) {
    std::vector<std::string> tokens;
    for (const auto& id : summary.tweet_ids) {
        const Tweet* tweet = dataset.find(id);
        if (tweet == nullptr) throw Error(ErrorCode::UnknownTweet, fmt::format("unknown tweet {}", id));
        const auto part = mode == RougeTokens::Raw ? explanation_tokens(tweet->raw_text) : tweet->tokens;
        tokens.insert(tokens.end(), part.begin(), part.end());
    }
    return tokens;
}

}  // namespace crisisgt
