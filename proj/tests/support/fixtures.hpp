#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "crisisgt/topic.hpp"
#include "json.hpp"

namespace crisisgt::testing {

// Raw words whose normalized forms belong to exactly one bundled topic.
inline const std::map<TopicLabel, std::vector<std::string>>& topic_words() {
    static const std::map<TopicLabel, std::vector<std::string>> words = {
        {TopicLabel::AffectedPopulation, {"injured", "dead", "missing"}},
        {TopicLabel::EarlyWarning, {"warning", "alert", "forecast"}},
        {TopicLabel::EmergencyExercises, {"drill", "preparedness", "rehearsal"}},
        {TopicLabel::EmotionalDistress, {"scared", "panic", "terrified"}},
        {TopicLabel::HumanitarianEvent, {"humanitarian", "unicef", "oxfam"}},
        {TopicLabel::Impact, {"aftermath", "cleanup", "displaced"}},
        {TopicLabel::InfrastructureDamage, {"damaged", "bridge", "collapsed"}},
        {TopicLabel::VolunteeringSupport, {"volunteer", "donate", "fundraiser"}},
        {TopicLabel::Prayer, {"pray", "condolence", "bless"}},
        {TopicLabel::SupplyNeeds, {"food", "blanket", "medicine"}},
    };
    return words;
}

// Vowel-free words that survive normalization unchanged and match no
// lexicon term. The tag letter keeps vocabularies of different groups apart.
inline std::string filler(char tag, std::size_t n) {
    static const std::string letters = "bcfhjkmpqvwxz";
    std::string word = "zq";
    word.push_back(tag);
    do {
        word += letters[n % letters.size()];
        n /= letters.size();
    } while (n > 0);
    return word;
}

inline char topic_tag(TopicLabel topic) {
    static const std::string letters = "bcfhjkmpqvwxz";
    return letters[static_cast<std::size_t>(topic) % letters.size()];
}

inline const std::map<TopicLabel, std::size_t>& d4_counts() {
    static const std::map<TopicLabel, std::size_t> counts = {
        {TopicLabel::AffectedPopulation, 440}, {TopicLabel::EarlyWarning, 42},
        {TopicLabel::EmergencyExercises, 12},  {TopicLabel::EmotionalDistress, 14},
        {TopicLabel::HumanitarianEvent, 7},    {TopicLabel::Impact, 103},
        {TopicLabel::InfrastructureDamage, 202}, {TopicLabel::VolunteeringSupport, 323},
        {TopicLabel::Prayer, 638},
    };
    return counts;
}

// Raw JSONL corpus with the given topic histogram plus unclassifiable
// chatter. Every tweet carries one unique word so none are duplicates.
// Returns the generating topic of each id ("" for chatter).
inline std::map<std::string, std::string> write_shaped_corpus(const std::filesystem::path& path,
                                                               const std::map<TopicLabel, std::size_t>& counts,
                                                               std::size_t chatter, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::pair<std::string, std::string>> rows;  // topic, text
    std::size_t unique = 0;
    for (const auto& [topic, n] : counts) {
        const auto& words = topic_words().at(topic);
        for (std::size_t i = 0; i < n; ++i) {
            std::string text = words[rng() % words.size()] + " " + words[rng() % words.size()];
            for (int f = 0; f < 3; ++f) text += " " + filler(topic_tag(topic), rng() % 30);
            text += " " + filler('a', unique++);
            rows.emplace_back(std::string(to_string(topic)), text);
        }
    }
    for (std::size_t i = 0; i < chatter; ++i) {
        std::string text = filler('d', rng() % 30) + " " + filler('d', rng() % 30);
        text += " " + filler('a', unique++);
        rows.emplace_back("", text);
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    std::map<std::string, std::string> truth;
    std::ofstream out(path, std::ios::binary);
    const char* labels[] = {"high", "medium", "low"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string id = std::to_string(1000 + i);
        truth[id] = rows[i].first;
        out << nlohmann::json{{"id", id},
                              {"text", rows[i].second},
                              {"relevance_label", labels[i % 3]},
                              {"explanation", rows[i].second}}
                   .dump()
            << '\n';
    }
    return truth;
}

}  // namespace crisisgt::testing
