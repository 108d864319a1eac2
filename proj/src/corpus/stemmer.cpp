#include "crisisgt/corpus.hpp"

#include <string>

namespace crisisgt {

namespace {

bool ends_with(const std::string& word, std::string_view suffix) {
    return word.size() >= suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool has_vowel(std::string_view text) {
    for (char c : text) {
        if (is_vowel(c)) return true;
    }
    return false;
}

bool is_ascii_letter(char c) { return c >= 'a' && c <= 'z'; }

std::string undouble(std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] &&
        std::string_view("bdfgmnprt").find(stem[n - 1]) != std::string_view::npos) {
        stem.pop_back();
    }
    return stem;
}

constexpr std::size_t kMinStem = 3;

}  // namespace

const std::unordered_map<std::string, std::string>& Stemmer::default_exceptions() {
    static const std::unordered_map<std::string, std::string> table = {
        {"children", "child"}, {"people", "people"}, {"men", "man"},
        {"women", "woman"},    {"died", "die"},      {"dies", "die"},
        {"dying", "die"},      {"lives", "life"},    {"lying", "lie"},
        {"news", "news"},      {"series", "series"}, {"species", "species"},
        {"always", "always"},  {"texas", "texas"},   {"kansas", "kansas"},
        {"arkansas", "arkansas"}, {"angeles", "angeles"}, {"feet", "foot"},
        {"teeth", "tooth"},    {"geese", "goose"},   {"mice", "mouse"},
        {"police", "police"},  {"bodies", "body"},   {"prayed", "pray"},
        {"praying", "pray"},   {"prayers", "prayer"}, {"hurricane", "hurricane"},
        {"hurricanes", "hurricane"},
    };
    return table;
}

Stemmer::Stemmer() : Stemmer(default_exceptions()) {}

Stemmer::Stemmer(std::unordered_map<std::string, std::string> exceptions)
    : exceptions_(std::move(exceptions)) {
    // Exception targets must be fixed points of the rules.
    std::unordered_map<std::string, std::string> targets;
    for (const auto& [word, lemma] : exceptions_) targets.emplace(lemma, lemma);
    for (auto& [lemma, same] : targets) exceptions_.emplace(lemma, same);
}

std::string Stemmer::strip_once(const std::string& word) const {
    if (auto it = exceptions_.find(word); it != exceptions_.end()) return it->second;
    if (word.size() <= kMinStem || !is_ascii_letter(word.back())) return word;

    // Plurals.
    if (ends_with(word, "sses")) return word.substr(0, word.size() - 2);
    if (ends_with(word, "ies")) {
        if (word.size() > 4) return word.substr(0, word.size() - 3) + "y";
        return word.substr(0, word.size() - 1);
    }
    if (ends_with(word, "ches") || ends_with(word, "shes") || ends_with(word, "xes") ||
        ends_with(word, "zes")) {
        return word.substr(0, word.size() - 2);
    }
    if (ends_with(word, "s") && !ends_with(word, "ss") && !ends_with(word, "us") &&
        !ends_with(word, "is")) {
        return word.substr(0, word.size() - 1);
    }

    // Verbal suffixes.
    if (ends_with(word, "ing")) {
        const std::string stem = word.substr(0, word.size() - 3);
        if (stem.size() >= kMinStem && has_vowel(stem)) return undouble(stem);
    }
    if (ends_with(word, "ed") && !ends_with(word, "eed")) {
        const std::string stem = word.substr(0, word.size() - 2);
        if (stem.size() >= kMinStem && has_vowel(stem)) return undouble(stem);
    }

    if (word.back() == 'e' && word.size() > 4) return word.substr(0, word.size() - 1);
    return word;
}

std::string Stemmer::stem(std::string_view word) const {
    std::string current(word);
    // Each rule strictly shortens or maps into the exception table, so the
    // loop terminates well before the cap.
    for (int i = 0; i < 16; ++i) {
        std::string next = strip_once(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace crisisgt
