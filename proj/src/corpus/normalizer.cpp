#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>

#include <fmt/format.h>

#include "crisisgt/corpus.hpp"
#include "core/resources.hpp"
#include "crisisgt/error.hpp"

namespace crisisgt {

namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

std::size_t codepoints(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
    if (text.size() - pos < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i]) return false;
    }
    return true;
}

// Decodes the UTF-8 sequence at pos. Returns the code point and its byte
// length; invalid sequences decode as U+FFFD with length 1.
std::pair<char32_t, std::size_t> decode(std::string_view text, std::size_t pos) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) return {lead, 1};
    if ((lead & 0xE0) == 0xC0) { len = 2; cp = lead & 0x1F; }
    else if ((lead & 0xF0) == 0xE0) { len = 3; cp = lead & 0x0F; }
    else if ((lead & 0xF8) == 0xF0) { len = 4; cp = lead & 0x07; }
    else return {0xFFFD, 1};
    if (pos + len > text.size()) return {0xFFFD, 1};
    for (std::size_t i = 1; i < len; ++i) {
        const auto c = static_cast<unsigned char>(text[pos + i]);
        if ((c & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (c & 0x3F);
    }
    return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Latin-1 supplement and Latin Extended-A/B letters count as word
// characters; everything else outside ASCII (emoji, symbols, other
// scripts) is a separator.
bool is_latin_letter(char32_t cp) {
    return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

char32_t fold_latin(char32_t cp) {
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

bool is_handle_char(unsigned char c) { return is_ascii_alnum(c) || c == '_'; }

// Blanks out URLs, @mentions and HTML entities, and drops hashtag markers.
std::string strip_twitter_markup(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://") ||
            starts_with_ci(text, i, "www.")) {
            while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
            out.push_back(' ');
            continue;
        }
        if (c == '@' && i + 1 < text.size() &&
            is_handle_char(static_cast<unsigned char>(text[i + 1]))) {
            ++i;
            while (i < text.size() && is_handle_char(static_cast<unsigned char>(text[i]))) ++i;
            out.push_back(' ');
            continue;
        }
        if (c == '&') {
            std::size_t j = i + 1;
            if (j < text.size() && text[j] == '#') ++j;
            const std::size_t body = j;
            while (j < text.size() && is_ascii_alnum(static_cast<unsigned char>(text[j]))) ++j;
            if (j > body && j < text.size() && text[j] == ';') {
                i = j + 1;
                out.push_back(' ');
                continue;
            }
        }
        if (c == '#') {
            out.push_back(' ');
            ++i;
            continue;
        }
        out.push_back(static_cast<char>(c));
        ++i;
    }
    return out;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

// Splits marked-up-free text into lowercase words. Apostrophes inside words
// are dropped ("don't" -> "dont"), digit group separators are joined
// ("350,000" -> "350000") and decimal points between digits are kept.
std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        auto [cp, len] = decode(text, i);
        if (cp < 0x80 && is_ascii_alnum(static_cast<unsigned char>(cp))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        } else if (is_latin_letter(cp)) {
            append_utf8(current, fold_latin(cp));
        } else if ((cp == ',' || cp == '.') && !current.empty() &&
                   is_digit(static_cast<unsigned char>(current.back())) && i + 1 < text.size() &&
                   is_digit(static_cast<unsigned char>(text[i + 1]))) {
            if (cp == '.') current.push_back('.');
        } else if (is_apostrophe(cp) && !current.empty()) {
            // joined with whatever follows
        } else {
            flush();
        }
        i += len;
    }
    flush();
    return words;
}

std::string lowercase(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

NormalizerConfig NormalizerConfig::defaults() {
    NormalizerConfig config;
    config.stopwords = default_stopwords();
    return config;
}

Normalizer::Normalizer(NormalizerConfig config, std::set<std::string> disaster_keywords)
    : config_(std::move(config)) {
    for (const auto& keyword : disaster_keywords) keywords_.insert(lowercase(keyword));
    for (const auto& keyword : keywords_) {
        if (auto term = normalize_term(keyword)) normalized_keywords_.insert(*term);
    }
}

bool Normalizer::is_stopword(std::string_view term) const {
    return config_.stopwords.count(std::string(term)) > 0;
}

bool Normalizer::is_disaster_keyword(std::string_view term) const {
    return normalized_keywords_.count(std::string(term)) > 0;
}

std::optional<std::string> Normalizer::normalize_term(std::string_view word) const {
    const std::string lower = lowercase(word);
    if (lower.empty() || is_stopword(lower)) return std::nullopt;
    if (codepoints(lower) < 3) {
        if (keywords_.count(lower) > 0) return lower;
        return std::nullopt;
    }
    std::string stem = stemmer_.stem(lower);
    if (is_stopword(stem)) return std::nullopt;
    if (codepoints(stem) < 3 && keywords_.count(stem) == 0) return std::nullopt;
    return stem;
}

bool Normalizer::is_retweet(std::string_view text) const {
    const auto words = split_words(strip_twitter_markup(text));
    return !words.empty() && words.front() == "rt";
}

std::vector<std::string> Normalizer::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    for (const auto& word : split_words(strip_twitter_markup(text))) {
        if (auto term = normalize_term(word)) tokens.push_back(std::move(*term));
    }
    return tokens;
}

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& token : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

}  // namespace

Dataset normalize(const Dataset& dataset, const NormalizerConfig& config, NormalizeStats* stats) {
    const Normalizer normalizer(config, dataset.disaster_keywords);
    NormalizeStats local;
    Dataset out;
    out.name = dataset.name;
    out.disaster_keywords = dataset.disaster_keywords;
    out.summary_budget = dataset.summary_budget;

    std::unordered_set<std::string> seen;
    for (const Tweet& tweet : dataset.tweets) {
        if (config.retweets == RetweetPolicy::Drop && normalizer.is_retweet(tweet.raw_text)) {
            ++local.retweets;
            continue;
        }
        Tweet cleaned = tweet;
        cleaned.tokens = normalizer.tokenize(tweet.raw_text);
        if (cleaned.tokens.empty()) {
            ++local.empty;
            continue;
        }
        cleaned.clean_text = join(cleaned.tokens);
        if (!seen.insert(cleaned.clean_text).second) {
            ++local.duplicates;
            continue;
        }
        out.tweets.push_back(std::move(cleaned));
    }
    if (stats != nullptr) *stats = local;
    return out;
}

std::set<std::string> parse_term_list(std::string_view text) {
    std::set<std::string> terms;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && is_space(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && is_space(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        if (!line.empty()) terms.insert(lowercase(line));
        pos = end + 1;
    }
    return terms;
}

std::set<std::string> read_term_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read term list {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_term_list(buffer.str());
}

const std::set<std::string>& default_disaster_keywords() {
    static const std::set<std::string> keywords = parse_term_list(resources::kDisasterKeywords);
    return keywords;
}

const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> stopwords = [] {
        const auto terms = parse_term_list(resources::kStopwords);
        return std::unordered_set<std::string>(terms.begin(), terms.end());
    }();
    return stopwords;
}

}  // namespace crisisgt
