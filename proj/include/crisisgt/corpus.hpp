#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crisisgt/topic.hpp"

namespace crisisgt {

enum class RelevanceLabel { High, Medium, Low };

std::string_view to_string(RelevanceLabel label);
std::optional<RelevanceLabel> parse_relevance(std::string_view text);

struct Tweet {
    std::string id;
    std::string raw_text;
    std::string clean_text;
    std::vector<std::string> tokens;
    std::optional<TopicLabel> topic;
    std::optional<RelevanceLabel> relevance_label;
    std::optional<std::string> explanation;
};

struct Dataset {
    std::string name;
    std::vector<Tweet> tweets;
    std::set<std::string> disaster_keywords;
    int summary_budget = 40;

    const Tweet* find(std::string_view id) const;
};

// Rule-based suffix stemmer standing in for lemmatization. Words of three
// characters or fewer are returned unchanged, and no rule shortens a word
// below three characters. The result is a fixed point: stem(stem(w)) == stem(w).
class Stemmer {
public:
    Stemmer();
    explicit Stemmer(std::unordered_map<std::string, std::string> exceptions);

    std::string stem(std::string_view word) const;

    static const std::unordered_map<std::string, std::string>& default_exceptions();

private:
    std::string strip_once(const std::string& word) const;

    std::unordered_map<std::string, std::string> exceptions_;
};

enum class RetweetPolicy {
    Drop,          // tweets whose first token is "rt" are removed
    StripMarker,   // the leading "rt" marker is removed, the tweet is kept
};

struct NormalizerConfig {
    std::unordered_set<std::string> stopwords;
    RetweetPolicy retweets = RetweetPolicy::Drop;

    /// Bundled stopword list, drop policy.
    static NormalizerConfig defaults();
};

class Normalizer {
public:
    Normalizer(NormalizerConfig config, std::set<std::string> disaster_keywords);

    /// Full token pipeline for one text: case folding, removal of URLs,
    /// mentions, hashtag markers, HTML entities, emoticons and punctuation,
    /// stopword removal, stemming and the minimum-length rule.
    std::vector<std::string> tokenize(std::string_view text) const;

    /// Maps a single word onto the normalized vocabulary, or nullopt when the
    /// word would be filtered out. Lexicons and keyword lists go through this
    /// so that they match tokens produced by tokenize().
    std::optional<std::string> normalize_term(std::string_view word) const;

    bool is_retweet(std::string_view text) const;
    bool is_disaster_keyword(std::string_view term) const;
    bool is_stopword(std::string_view term) const;

    const std::set<std::string>& disaster_keywords() const { return keywords_; }
    /// Keywords mapped through normalize_term.
    const std::unordered_set<std::string>& normalized_keywords() const { return normalized_keywords_; }
    const NormalizerConfig& config() const { return config_; }
    const Stemmer& stemmer() const { return stemmer_; }

private:
    NormalizerConfig config_;
    std::set<std::string> keywords_;
    std::unordered_set<std::string> normalized_keywords_;
    Stemmer stemmer_;
};

enum class CorpusFormat { Jsonl, Csv };

std::optional<CorpusFormat> parse_format(std::string_view text);

struct IngestOptions {
    bool strict = false;
    std::string name;   // defaults to the file stem
    std::set<std::string> disaster_keywords = {};
    int summary_budget = 40;
};

struct IngestResult {
    Dataset dataset;
    std::size_t malformed = 0;
    std::vector<std::string> warnings;
};

/// Loads raw tweets. Normalization is not applied. Malformed records are
/// skipped with a warning, or raise Error(MalformedRecord) naming the line
/// when options.strict is set.
IngestResult ingest(const std::filesystem::path& path, CorpusFormat format,
                    const IngestOptions& options = {});

struct NormalizeStats {
    std::size_t retweets = 0;
    std::size_t duplicates = 0;
    std::size_t empty = 0;
};

Dataset normalize(const Dataset& dataset,
                  const NormalizerConfig& config = NormalizerConfig::defaults(),
                  NormalizeStats* stats = nullptr);

/// Parses a term-per-line list. Blank lines and '#' comments are ignored,
/// terms are lowercased.
std::set<std::string> read_term_list(const std::filesystem::path& path);
std::set<std::string> parse_term_list(std::string_view text);

const std::set<std::string>& default_disaster_keywords();
const std::unordered_set<std::string>& default_stopwords();

/// Normalized dataset interchange: one JSON object per tweet with the raw
/// fields plus "tokens". Reading a file without "tokens" normalizes it.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path,
                     const std::set<std::string>& disaster_keywords = default_disaster_keywords());

}  // namespace crisisgt
