#include "crisisgt/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "core/resources.hpp"
#include "crisisgt/error.hpp"
#include "json.hpp"

namespace crisisgt {

using nlohmann::json;

namespace {

void check_weight(TopicLabel topic, const std::string& term, double weight) {
    if (!(weight > 0.0 && weight <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("weight {} for term \"{}\" in topic {} is outside (0, 1]", weight,
                                term, to_string(topic)));
    }
}

}  // namespace

void TopicLexicon::add_seed(TopicLabel topic, const std::string& term, double weight) {
    check_weight(topic, term, weight);
    auto& entry = topics_[topic];
    entry.seeds.insert(term);
    auto [it, inserted] = entry.weights.emplace(term, weight);
    if (!inserted) it->second = std::max(it->second, weight);
}

void TopicLexicon::add_term(TopicLabel topic, const std::string& term, double weight) {
    check_weight(topic, term, weight);
    auto& entry = topics_[topic];
    auto [it, inserted] = entry.weights.emplace(term, weight);
    if (!inserted) it->second = std::max(it->second, weight);
}

const TopicTerms* TopicLexicon::terms(TopicLabel topic) const {
    auto it = topics_.find(topic);
    return it == topics_.end() ? nullptr : &it->second;
}

double TopicLexicon::weight(TopicLabel topic, std::string_view term) const {
    const TopicTerms* entry = terms(topic);
    if (entry == nullptr) return 0.0;
    auto it = entry->weights.find(std::string(term));
    return it == entry->weights.end() ? 0.0 : it->second;
}

bool TopicLexicon::contains(std::string_view term) const {
    const std::string key(term);
    for (const auto& [topic, entry] : topics_) {
        if (entry.weights.count(key) > 0) return true;
    }
    return false;
}

bool TopicLexicon::empty() const {
    for (const auto& [topic, entry] : topics_) {
        if (!entry.weights.empty()) return false;
    }
    return true;
}

double TopicLexicon::max_seed_weight() const {
    double best = 0.0;
    for (const auto& [topic, entry] : topics_) {
        for (const auto& seed : entry.seeds) best = std::max(best, entry.weights.at(seed));
    }
    return best;
}

void TopicLexicon::validate() const {
    for (const auto& [topic, entry] : topics_) {
        if (topic == TopicLabel::Irrelevant) {
            if (!entry.weights.empty()) {
                throw Error(ErrorCode::InvalidArgument, "the Irrelevant topic cannot carry terms");
            }
            continue;
        }
        if (entry.seeds.empty()) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("topic {} has no seed terms", to_string(topic)));
        }
        for (const auto& [term, weight] : entry.weights) check_weight(topic, term, weight);
    }
}

TopicLexicon parse_lexicon(std::string_view json_text, const Normalizer& normalizer) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, fmt::format("lexicon is not valid JSON: {}", e.what()));
    }
    if (!root.is_object()) throw Error(ErrorCode::MalformedRecord, "lexicon must be a JSON object");

    TopicLexicon lexicon;
    for (const auto& [name, body] : root.items()) {
        const auto topic = parse_topic(name);
        if (!topic) throw Error(ErrorCode::MalformedRecord, fmt::format("unknown topic \"{}\"", name));
        if (!body.is_object()) {
            throw Error(ErrorCode::MalformedRecord, fmt::format("topic \"{}\" must map to an object", name));
        }
        std::map<std::string, double> raw_weights;
        if (body.contains("weights")) {
            for (const auto& [term, weight] : body["weights"].items()) {
                raw_weights[term] = weight.get<double>();
            }
        }
        std::set<std::string> raw_seeds;
        if (body.contains("seeds")) {
            for (const auto& seed : body["seeds"]) raw_seeds.insert(seed.get<std::string>());
        }
        auto term_of = [&](const std::string& raw) -> std::optional<std::string> {
            auto term = normalizer.normalize_term(raw);
            if (!term) spdlog::warn("lexicon term \"{}\" ({}) is filtered by normalization", raw, name);
            return term;
        };
        for (const auto& raw : raw_seeds) {
            auto it = raw_weights.find(raw);
            const double weight = it == raw_weights.end() ? 1.0 : it->second;
            if (auto term = term_of(raw)) lexicon.add_seed(*topic, *term, weight);
        }
        for (const auto& [raw, weight] : raw_weights) {
            if (raw_seeds.count(raw)) continue;
            if (auto term = term_of(raw)) lexicon.add_term(*topic, *term, weight);
        }
    }
    lexicon.validate();
    return lexicon;
}

TopicLexicon load_lexicon(const std::filesystem::path& path, const Normalizer& normalizer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read lexicon {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_lexicon(buffer.str(), normalizer);
}

TopicLexicon default_lexicon(const Normalizer& normalizer) {
    return parse_lexicon(resources::kLexicon, normalizer);
}

std::string lexicon_to_json(const TopicLexicon& lexicon) {
    json root = json::object();
    for (const auto& [topic, entry] : lexicon.topics()) {
        json weights = json::object();
        for (const auto& [term, weight] : entry.weights) weights[term] = weight;
        root[std::string(to_string(topic))] = {{"seeds", entry.seeds}, {"weights", weights}};
    }
    return root.dump(2);
}

double default_threshold(const TopicLexicon& lexicon) { return 0.5 * lexicon.max_seed_weight(); }

std::optional<TopicLabel> TopicAssignment::topic_of(std::string_view id) const {
    for (const auto& [topic, ids] : buckets) {
        if (std::find(ids.begin(), ids.end(), id) != ids.end()) return topic;
    }
    return std::nullopt;
}

std::size_t TopicAssignment::classified_count() const {
    std::size_t total = 0;
    for (const auto& [topic, ids] : buckets) total += ids.size();
    return total;
}

std::map<TopicLabel, double> topic_scores(const std::vector<std::string>& tokens,
                                          const TopicLexicon& lexicon) {
    std::set<std::string> distinct(tokens.begin(), tokens.end());
    std::map<TopicLabel, double> scores;
    for (const auto& [topic, entry] : lexicon.topics()) {
        double score = 0.0;
        for (const auto& term : distinct) {
            auto it = entry.weights.find(term);
            if (it != entry.weights.end()) score += it->second;
        }
        scores[topic] = score;
    }
    return scores;
}

TopicAssignment classify(const Dataset& dataset, const TopicLexicon& lexicon, double threshold) {
    if (lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "cannot classify with an empty lexicon");
    if (threshold < 0.0) throw Error(ErrorCode::InvalidArgument, "threshold must be non-negative");

    TopicAssignment assignment;
    for (const Tweet& tweet : dataset.tweets) {
        const auto scores = topic_scores(tweet.tokens, lexicon);
        std::optional<TopicLabel> best;
        double best_score = 0.0;
        // std::map iterates in TopicLabel order, so strict '>' keeps the
        // earliest topic on ties.
        for (const auto& [topic, score] : scores) {
            if (topic == TopicLabel::Irrelevant) continue;
            if (!best || score > best_score) {
                best = topic;
                best_score = score;
            }
        }
        if (best && best_score > 0.0 && best_score >= threshold) {
            assignment.buckets[*best].push_back(tweet.id);
        } else {
            assignment.dropped.push_back(tweet.id);
        }
    }
    return assignment;
}

TopicLexicon expand_lexicon(const Dataset& dataset, const TopicLexicon& lexicon, std::size_t k,
                            std::optional<double> threshold) {
    if (k == 0) {
        spdlog::warn("lexicon expansion with k = 0 leaves the lexicon unchanged");
        return lexicon;
    }
    if (dataset.tweets.empty()) return lexicon;
    const TermIndex index = tfidf_index(dataset);
    const TopicAssignment assignment =
        classify(dataset, lexicon, threshold.value_or(default_threshold(lexicon)));

    TopicLexicon expanded = lexicon;
    for (const auto& [topic, ids] : assignment.buckets) {
        std::map<TermId, double> mass;
        for (const auto& id : ids) {
            const std::size_t pos = *index.position(id);
            for (const auto& [term, weight] : index.weights(pos).entries) mass[term] += weight;
        }
        std::vector<std::pair<std::string, double>> candidates;
        for (const auto& [term, score] : mass) {
            const std::string& text = index.term(term);
            if (score > 0.0 && !lexicon.contains(text)) candidates.emplace_back(text, score);
        }
        if (candidates.empty()) continue;
        std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        const double top = candidates.front().second;
        const std::size_t take = std::min(k, candidates.size());
        for (std::size_t i = 0; i < take; ++i) {
            expanded.add_term(topic, candidates[i].first, std::min(1.0, candidates[i].second / top));
        }
    }
    return expanded;
}

std::map<TopicLabel, std::size_t> topic_histogram(const TopicAssignment& assignment) {
    std::map<TopicLabel, std::size_t> histogram;
    for (const auto& [topic, ids] : assignment.buckets) {
        if (!ids.empty()) histogram[topic] = ids.size();
    }
    return histogram;
}

void apply_assignment(Dataset& dataset, const TopicAssignment& assignment) {
    std::unordered_map<std::string, TopicLabel> lookup;
    for (const auto& [topic, ids] : assignment.buckets) {
        for (const auto& id : ids) lookup.emplace(id, topic);
    }
    for (Tweet& tweet : dataset.tweets) {
        auto it = lookup.find(tweet.id);
        tweet.topic = it == lookup.end() ? std::nullopt : std::optional<TopicLabel>(it->second);
    }
}

std::string assignment_to_json(const TopicAssignment& assignment) {
    json topics = json::object();
    json histogram = json::object();
    for (const auto& [topic, ids] : assignment.buckets) {
        topics[std::string(to_string(topic))] = ids;
        histogram[std::string(to_string(topic))] = ids.size();
    }
    json root = {{"topics", topics},
                 {"dropped", assignment.dropped},
                 {"histogram", histogram},
                 {"classified", assignment.classified_count()}};
    return root.dump(2);
}

TopicAssignment assignment_from_json(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedRecord, fmt::format("assignment is not valid JSON: {}", e.what()));
    }
    TopicAssignment assignment;
    if (!root.contains("topics") || !root["topics"].is_object()) {
        throw Error(ErrorCode::MalformedRecord, "assignment needs a \"topics\" object");
    }
    for (const auto& [name, ids] : root["topics"].items()) {
        const auto topic = parse_topic(name);
        if (!topic) throw Error(ErrorCode::MalformedRecord, fmt::format("unknown topic \"{}\"", name));
        auto list = ids.get<std::vector<std::string>>();
        if (!list.empty()) assignment.buckets[*topic] = std::move(list);
    }
    if (root.contains("dropped")) assignment.dropped = root["dropped"].get<std::vector<std::string>>();
    return assignment;
}

}  // namespace crisisgt
