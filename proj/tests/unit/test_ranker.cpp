#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "crisisgt/error.hpp"
#include "crisisgt/ranker.hpp"
#include "json.hpp"

using namespace crisisgt;

namespace {

Dataset tokenized(const std::vector<std::pair<std::string, std::vector<std::string>>>& rows) {
    Dataset dataset;
    dataset.name = "fixture";
    for (const auto& [id, tokens] : rows) {
        Tweet tweet;
        tweet.id = id;
        tweet.raw_text = "text of " + id;
        tweet.tokens = tokens;
        dataset.tweets.push_back(std::move(tweet));
    }
    return dataset;
}

std::vector<const Tweet*> pointers(const Dataset& dataset, std::size_t from, std::size_t to) {
    std::vector<const Tweet*> out;
    for (std::size_t i = from; i < to; ++i) out.push_back(&dataset.tweets[i]);
    return out;
}

TopicLexicon flood_lexicon() {
    TopicLexicon lexicon;
    lexicon.add_seed(TopicLabel::InfrastructureDamage, "bridg");
    lexicon.add_seed(TopicLabel::InfrastructureDamage, "road", 0.5);
    return lexicon;
}

// Independent greedy oracle: recomputes tf-idf, relevance and cosine from the
// raw token lists and re-evaluates the argmax at every step.
std::vector<std::string> oracle_order(const Dataset& dataset, std::size_t from, std::size_t to,
                                      const std::set<std::string>& relevant, double lambda) {
    const double n = static_cast<double>(dataset.tweets.size());
    std::map<std::string, double> df;
    for (const auto& t : dataset.tweets) {
        for (const auto& w : std::set<std::string>(t.tokens.begin(), t.tokens.end())) df[w] += 1.0;
    }
    std::vector<std::map<std::string, double>> vec;
    std::vector<double> rel;
    for (std::size_t i = from; i < to; ++i) {
        std::map<std::string, double> v;
        for (const auto& w : dataset.tweets[i].tokens) v[w] += 1.0;
        double r = 0.0;
        for (auto& [w, x] : v) {
            x *= std::log(n / df[w]);
            if (relevant.count(w)) r += x;
        }
        vec.push_back(v);
        rel.push_back(r);
    }
    const double top = *std::max_element(rel.begin(), rel.end());
    if (top > 0) for (double& r : rel) r /= top;
    auto cos = [&](std::size_t a, std::size_t b) {
        double dot = 0, na = 0, nb = 0;
        for (const auto& [w, x] : vec[a]) {
            na += x * x;
            auto it = vec[b].find(w);
            if (it != vec[b].end()) dot += x * it->second;
        }
        for (const auto& [w, x] : vec[b]) nb += x * x;
        return na > 0 && nb > 0 ? dot / std::sqrt(na * nb) : 0.0;
    };
    const std::size_t m = to - from;
    std::vector<std::size_t> chosen;
    std::vector<std::string> order;
    while (chosen.size() < m) {
        std::size_t best = m;
        double best_score = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            double penalty = 0;
            if (!chosen.empty()) {
                penalty = -1e300;
                for (auto s : chosen) penalty = std::max(penalty, cos(i, s));
            }
            const double score = lambda * rel[i] - (1 - lambda) * penalty;
            const auto& id = dataset.tweets[from + i].id;
            if (best == m || score > best_score + 1e-12 ||
                (std::abs(score - best_score) <= 1e-12 && id_less(id, dataset.tweets[from + best].id))) {
                best = i;
                best_score = score;
            }
        }
        chosen.push_back(best);
        order.push_back(dataset.tweets[from + best].id);
    }
    return order;
}

std::vector<std::string> ids_of(const std::vector<RankedTweet>& ranked) {
    std::vector<std::string> ids;
    for (const auto& r : ranked) ids.push_back(r.id);
    return ids;
}

}  // namespace

TEST_SUITE("shortlist") {
    TEST_CASE("rounding up the quarter") {
        CHECK(shortlist_size(1113) == 279);
        CHECK(shortlist_size(42) == 25);
        CHECK(shortlist_size(24) == 24);
        CHECK(shortlist_size(25) == 25);
        CHECK(shortlist_size(26) == 25);
        CHECK(shortlist_size(101) == 26);
        CHECK(shortlist_size(1) == 1);
    }

    TEST_CASE("property: bounded by n and nondecreasing above 25") {
        for (std::size_t n = 1; n <= 20000; ++n) {
            CHECK(shortlist_size(n) <= n);
            CHECK(shortlist_size(n) == (n <= 25 ? n : std::max<std::size_t>(25, static_cast<std::size_t>(std::ceil(n / 4.0)))));
            if (n > 26) CHECK(shortlist_size(n) >= shortlist_size(n - 1));
        }
    }

    TEST_CASE("table-shaped totals") {
        std::size_t d4 = 0, d4n = 0;
        const std::vector<std::size_t> d4_sizes = {110, 25, 12, 14, 7, 26, 51, 81, 160};
        const std::vector<std::size_t> d4_counts = {440, 42, 12, 14, 7, 103, 202, 323, 638};
        for (std::size_t i = 0; i < d4_counts.size(); ++i) {
            CHECK(shortlist_size(d4_counts[i]) == d4_sizes[i]);
            d4 += shortlist_size(d4_counts[i]);
            d4n += d4_counts[i];
        }
        CHECK(d4 == 486);
        CHECK(d4n == 1781);
        std::size_t d5 = 0, d5n = 0;
        for (std::size_t n : {73, 49, 24, 5, 62, 158, 1113, 89}) {
            d5 += shortlist_size(n);
            d5n += n;
        }
        CHECK(d5 == 448);
        CHECK(d5n == 1573);
    }
}

TEST_SUITE("dmmr") {
    TEST_CASE("lambda 1 orders by relevance") {
        const auto dataset = tokenized({{"1", {"bridg", "zqb"}},
                                        {"2", {"bridg", "road", "bridg"}},
                                        {"3", {"zqc"}},
                                        {"4", {"road"}},
                                        {"5", {"zqd", "zqb"}}});
        const auto index = tfidf_index(dataset);
        DmmrParams params;
        params.lambda = 1.0;
        const auto ranked = dmmr_rank(pointers(dataset, 0, 5), index, flood_lexicon(),
                                      TopicLabel::InfrastructureDamage, {}, params);
        const auto rel = dmmr_relevance(pointers(dataset, 0, 5), index, flood_lexicon(),
                                        TopicLabel::InfrastructureDamage, {});
        for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].rel >= ranked[i].rel);
        CHECK(ranked.front().id == "2");
        CHECK(ranked.front().rel == 1.0);
        // Zero-relevance tail falls back to the smaller id.
        CHECK(ids_of(ranked) == std::vector<std::string>{"2", "1", "4", "3", "5"});
        CHECK(*std::max_element(rel.begin(), rel.end()) == 1.0);
    }

    TEST_CASE("duplicate tweet pays the full similarity penalty") {
        const auto dataset = tokenized({{"1", {"bridg", "river"}}, {"2", {"bridg", "river"}},
                                        {"3", {"zqb"}}, {"4", {"zqc"}}});
        const auto index = tfidf_index(dataset);
        DmmrParams params;
        params.lambda = 0.5;
        const auto ranked = dmmr_rank(pointers(dataset, 0, 2), index, flood_lexicon(),
                                      TopicLabel::InfrastructureDamage, {}, params);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].id == "1");
        CHECK(ranked[1].mmr == doctest::Approx(0.5 * ranked[1].rel - 0.5).epsilon(1e-12));
        CHECK(ranked[1].rel == 1.0);
    }

    TEST_CASE("keyword terms count toward relevance") {
        const auto dataset = tokenized({{"1", {"zqb", "flood"}}, {"2", {"zqb", "zqc"}}, {"3", {"zqd"}}});
        const auto index = tfidf_index(dataset);
        const auto rel = dmmr_relevance(pointers(dataset, 0, 2), index, flood_lexicon(),
                                        TopicLabel::InfrastructureDamage, {"flood"});
        CHECK(rel == std::vector<double>{1.0, 0.0});
    }

    TEST_CASE("crafted six-tweet bucket matches the oracle") {
        const auto dataset = tokenized({{"1", {"bridg", "collaps", "river"}},
                                        {"2", {"bridg", "collaps", "river"}},
                                        {"3", {"road", "block", "tree"}},
                                        {"4", {"bridg", "road", "crack"}},
                                        {"5", {"flood", "river", "bank"}},
                                        {"6", {"road", "tree"}},
                                        {"7", {"pray"}},
                                        {"8", {"zqb"}}});
        const auto index = tfidf_index(dataset);
        const std::unordered_set<std::string> keywords = {"flood"};
        for (double lambda : {0.0, 0.3, 0.5, 0.7, 1.0}) {
            DmmrParams params;
            params.lambda = lambda;
            const auto ranked = dmmr_rank(pointers(dataset, 0, 6), index, flood_lexicon(),
                                          TopicLabel::InfrastructureDamage, keywords, params);
            CHECK(ids_of(ranked) == oracle_order(dataset, 0, 6, {"bridg", "road", "flood"}, lambda));
        }
    }

    TEST_CASE("property: random buckets match the oracle and form a permutation prefix") {
        std::mt19937_64 rng(2024);
        const std::vector<std::string> vocab = {"bridg", "road", "flood", "river", "tree", "zqb",
                                                "zqc",   "zqd",  "zqf",   "bank",  "crack"};
        std::size_t trials = 0;
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<std::pair<std::string, std::vector<std::string>>> rows;
            const std::size_t total = 3 + rng() % 10;
            for (std::size_t i = 0; i < total; ++i) {
                std::vector<std::string> tokens;
                const auto len = 1 + rng() % 5;
                for (std::size_t j = 0; j < len; ++j) tokens.push_back(vocab[rng() % vocab.size()]);
                rows.emplace_back(std::to_string(i + 1), tokens);
            }
            const auto dataset = tokenized(rows);
            const auto index = tfidf_index(dataset);
            const std::size_t m = 1 + rng() % total;
            DmmrParams params;
            params.lambda = (rng() % 11) / 10.0;
            const auto ranked = dmmr_rank(pointers(dataset, 0, m), index, flood_lexicon(),
                                          TopicLabel::InfrastructureDamage, {"flood"}, params);
            auto ids = ids_of(ranked);
            CHECK(ids == oracle_order(dataset, 0, m, {"bridg", "road", "flood"}, params.lambda));

            const std::size_t limit = rng() % (m + 1);
            const auto prefix = dmmr_rank(pointers(dataset, 0, m), index, flood_lexicon(),
                                          TopicLabel::InfrastructureDamage, {"flood"}, params, limit);
            CHECK(prefix.size() == limit);
            CHECK(std::equal(prefix.begin(), prefix.end(), ranked.begin(),
                             [](const auto& a, const auto& b) { return a.id == b.id; }));
            std::sort(ids.begin(), ids.end());
            CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
            CHECK(ids.size() == m);

            // Doubling every tf-idf weight leaves the greedy order unchanged.
            const auto doubled = dmmr_rank(pointers(dataset, 0, m), index.scaled(2.0), flood_lexicon(),
                                           TopicLabel::InfrastructureDamage, {"flood"}, params);
            CHECK(ids_of(doubled) == ids_of(ranked));
            ++trials;
        }
        CHECK(trials == 300);
    }

    TEST_CASE("embedding similarity") {
        const auto dataset = tokenized({{"1", {"bridg", "river"}}, {"2", {"bridg", "stream"}},
                                        {"3", {"bridg", "tree"}}, {"4", {"zqb"}}});
        const auto index = tfidf_index(dataset);
        EmbeddingTable table(2);
        table.set("river", {1.0, 0.0});
        table.set("stream", {1.0, 0.0});
        table.set("tree", {0.0, 1.0});
        DmmrParams params;
        params.lambda = 0.5;
        params.sim = SimilarityKind::EmbeddingCosine;
        params.embeddings = &table;
        const auto ranked = dmmr_rank(pointers(dataset, 0, 3), index, flood_lexicon(),
                                      TopicLabel::InfrastructureDamage, {}, params);
        // 2 is a near-synonym of 1, so the dissimilar 3 is taken second.
        CHECK(ids_of(ranked) == std::vector<std::string>{"1", "3", "2"});
        params.embeddings = nullptr;
        CHECK_THROWS_AS(dmmr_rank(pointers(dataset, 0, 3), index, flood_lexicon(),
                                  TopicLabel::InfrastructureDamage, {}, params),
                        Error);
    }

    TEST_CASE("errors") {
        const auto dataset = tokenized({{"1", {"bridg"}}});
        const auto index = tfidf_index(dataset);
        DmmrParams params;
        CHECK_THROWS_AS(dmmr_rank({}, index, flood_lexicon(), TopicLabel::InfrastructureDamage, {}, params),
                        Error);
        params.lambda = 1.5;
        CHECK_THROWS_AS(dmmr_rank(pointers(dataset, 0, 1), index, flood_lexicon(),
                                  TopicLabel::InfrastructureDamage, {}, params),
                        Error);
        CHECK(parse_similarity("embedding") == SimilarityKind::EmbeddingCosine);
        CHECK_FALSE(parse_similarity("jaccard").has_value());
        CHECK(id_less("9", "10"));
        CHECK(id_less("a10", "a9"));
    }
}

TEST_SUITE("candidates") {
    TEST_CASE("D4-shaped assignment gives 486 of 1781") {
        const std::vector<std::pair<TopicLabel, std::size_t>> counts = {
            {TopicLabel::AffectedPopulation, 440}, {TopicLabel::EarlyWarning, 42},
            {TopicLabel::EmergencyExercises, 12},  {TopicLabel::EmotionalDistress, 14},
            {TopicLabel::HumanitarianEvent, 7},    {TopicLabel::Impact, 103},
            {TopicLabel::InfrastructureDamage, 202}, {TopicLabel::VolunteeringSupport, 323},
            {TopicLabel::Prayer, 638}};
        std::mt19937_64 rng(5);
        std::vector<std::pair<std::string, std::vector<std::string>>> rows;
        TopicAssignment assignment;
        for (const auto& [topic, count] : counts) {
            for (std::size_t i = 0; i < count; ++i) {
                const std::string id = std::to_string(rows.size() + 1);
                rows.emplace_back(id, std::vector<std::string>{"bridg", "w" + std::to_string(rng() % 300)});
                assignment.buckets[topic].push_back(id);
            }
        }
        const auto dataset = tokenized(rows);
        const auto report = build_candidates(dataset, assignment, tfidf_index(dataset), flood_lexicon(), {},
                                             DmmrParams{});
        CHECK(report.shortlisted == 486);
        CHECK(report.classified == 1781);
        CHECK(report.fraction() == doctest::Approx(486.0 / 1781.0));
        CHECK(report.fraction() >= 0.2637);
        CHECK(report.fraction() <= 0.3059);
        for (const auto& set : report.sets) {
            CHECK(set.ranked_ids.size() == shortlist_size(set.source_size));
            const auto& bucket = assignment.buckets.at(set.topic);
            for (const auto& id : set.ranked_ids) {
                CHECK(std::find(bucket.begin(), bucket.end(), id) != bucket.end());
            }
        }
    }

    TEST_CASE("single small topic passes whole") {
        std::vector<std::pair<std::string, std::vector<std::string>>> rows;
        TopicAssignment assignment;
        for (int i = 1; i <= 10; ++i) {
            rows.emplace_back(std::to_string(i), std::vector<std::string>{"road", "x" + std::to_string(i)});
            assignment.buckets[TopicLabel::InfrastructureDamage].push_back(std::to_string(i));
        }
        const auto dataset = tokenized(rows);
        const auto report = build_candidates(dataset, assignment, tfidf_index(dataset), flood_lexicon(), {},
                                             DmmrParams{});
        REQUIRE(report.sets.size() == 1);
        CHECK(report.sets[0].ranked_ids.size() == 10);
        CHECK_THROWS_AS(build_candidates(dataset, TopicAssignment{}, tfidf_index(dataset), flood_lexicon(),
                                         {}, DmmrParams{}),
                        Error);
    }

    TEST_CASE("payload carries no scores and round trips") {
        const auto dataset = tokenized({{"1", {"road"}}, {"2", {"bridg"}}, {"3", {"zqb"}}});
        TopicAssignment assignment;
        assignment.buckets[TopicLabel::InfrastructureDamage] = {"1", "2"};
        const auto report = build_candidates(dataset, assignment, tfidf_index(dataset), flood_lexicon(), {},
                                             DmmrParams{});
        const auto text = candidates_to_json(report.sets);
        const auto root = nlohmann::json::parse(text);
        REQUIRE(root.is_array());
        for (const auto& entry : root) {
            std::set<std::string> keys;
            for (const auto& [k, v] : entry.items()) keys.insert(k);
            CHECK(keys == std::set<std::string>{"topic", "source_size", "tweets"});
            for (const auto& tweet : entry["tweets"]) {
                std::set<std::string> tkeys;
                for (const auto& [k, v] : tweet.items()) tkeys.insert(k);
                CHECK(tkeys == std::set<std::string>{"id", "text"});
            }
        }
        CHECK(text.find("score") == std::string::npos);
        const auto back = candidates_from_json(text);
        REQUIRE(back.size() == 1);
        CHECK(back[0].ranked_ids == report.sets[0].ranked_ids);
        CHECK(back[0].texts[0] == "text of 1");
        CHECK_THROWS_AS(candidates_from_json(R"([{"topic": "Irrelevant", "source_size": 1, "tweets": []}])"),
                        Error);
    }
}
