#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "doctest.h"

#include "crisisgt/error.hpp"
#include "crisisgt/summarizers.hpp"

using namespace crisisgt;

namespace {

Dataset tokenized(const std::vector<std::vector<std::string>>& rows) {
    Dataset dataset;
    dataset.name = "fixture";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Tweet tweet;
        tweet.id = "t" + std::to_string(i + 1);
        tweet.raw_text = tweet.id;
        tweet.tokens = rows[i];
        dataset.tweets.push_back(std::move(tweet));
    }
    return dataset;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n) {
    static const std::vector<std::string> vocab = {"flood", "river", "bridg", "rescu", "boat", "pray",
                                                   "damag", "road",  "injur", "dead",  "food", "water",
                                                   "zqb",   "zqc",   "zqd",   "zqf",   "12",   "5.8"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> tokens;
        for (std::size_t j = 0, len = 1 + rng() % 6; j < len; ++j) tokens.push_back(vocab[rng() % vocab.size()]);
        rows.push_back(tokens);
    }
    return tokenized(rows);
}

SentenceGraph graph_of(const std::vector<std::vector<double>>& w) {
    SentenceGraph g;
    g.weights = w;
    for (std::size_t i = 0; i < w.size(); ++i) g.nodes.push_back(std::to_string(i));
    return g;
}

// Stationary vector of the damped chain from an eigen decomposition.
std::vector<double> eigen_stationary(const std::vector<std::vector<double>>& w, double d) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0;
        for (Eigen::Index j = 0; j < n; ++j) row += i == j ? 0 : w[i][j];
        for (Eigen::Index j = 0; j < n; ++j) {
            const double m = row > 0 ? (i == j ? 0 : w[i][j] / row) : 1.0 / n;
            g(i, j) = (1 - d) / n + d * m;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(g.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
        if (std::abs(solver.eigenvalues()(i) - 1.0) < std::abs(solver.eigenvalues()(best) - 1.0)) best = i;
    }
    Eigen::VectorXd v = solver.eigenvectors().col(best).real();
    v /= v.sum();
    return std::vector<double>(v.data(), v.data() + n);
}

}  // namespace

TEST_SUITE("methods") {
    TEST_CASE("names") {
        for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
        try {
            parse_method("textrank");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnknownMethod);
        }
    }

    TEST_CASE("property: budget, uniqueness, determinism for every method") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 12; ++trial) {
            const auto dataset = random_dataset(rng, 5 + rng() % 40);
            const std::size_t budget = 1 + rng() % (dataset.tweets.size() + 5);
            SummarizerOptions options;
            options.seed = rng();
            for (Method m : all_methods()) {
                CAPTURE(to_string(m));
                const auto a = summarize(m, dataset, budget, options);
                const auto b = summarize(m, dataset, budget, options);
                CHECK(a == b);
                CHECK(a.tweet_ids.size() <= std::min(budget, dataset.tweets.size()));
                CHECK(a.budget == static_cast<int>(budget));
                std::set<std::string> unique(a.tweet_ids.begin(), a.tweet_ids.end());
                CHECK(unique.size() == a.tweet_ids.size());
                for (const auto& id : a.tweet_ids) CHECK(dataset.find(id) != nullptr);
                if (m != Method::OntoDSummLite && m != Method::EnsumLite) {
                    CHECK(a.tweet_ids.size() == std::min(budget, dataset.tweets.size()));
                }
            }
        }
    }

    TEST_CASE("budget at or above corpus size selects everything") {
        std::mt19937_64 rng(4);
        const auto dataset = random_dataset(rng, 9);
        for (Method m : all_methods()) {
            if (m == Method::OntoDSummLite || m == Method::EnsumLite) continue;
            CAPTURE(to_string(m));
            for (std::size_t budget : {9u, 20u}) {
                auto ids = summarize(m, dataset, budget).tweet_ids;
                std::sort(ids.begin(), ids.end());
                std::vector<std::string> all;
                for (const auto& t : dataset.tweets) all.push_back(t.id);
                std::sort(all.begin(), all.end());
                CHECK(ids == all);
            }
        }
        CHECK_THROWS_AS(summarize(Method::Luhn, dataset, 0), Error);
        CHECK_THROWS_AS(summarize(Method::Luhn, Dataset{}, 3), Error);
    }
}

TEST_SUITE("luhn") {
    TEST_CASE("dominant term leads") {
        const auto dataset = tokenized({{"boat", "zqb"},
                                        {"pray", "zqc", "zqd"},
                                        {"flood", "zqf"},
                                        {"flood", "river"},
                                        {"flood", "road", "zqh"},
                                        {"flood", "zqj"},
                                        {"flood", "zqk", "zqm"},
                                        {"river", "zqn"}});
        std::map<std::string, int> freq;
        for (const auto& t : dataset.tweets) for (const auto& w : t.tokens) ++freq[w];
        const auto top = std::max_element(freq.begin(), freq.end(),
                                          [](const auto& a, const auto& b) { return a.second < b.second; });
        REQUIRE(top->first == "flood");
        const auto summary = summarize(Method::Luhn, dataset, 3);
        const auto* first = dataset.find(summary.tweet_ids.front());
        CHECK(std::find(first->tokens.begin(), first->tokens.end(), "flood") != first->tokens.end());
    }
}

TEST_SUITE("sumbasic") {
    TEST_CASE("squared probabilities push the duplicate back") {
        const auto dataset = tokenized({{"flood", "river"}, {"flood", "river"}, {"rescu", "boat"}});
        const auto summary = summarize(Method::SumBasic, dataset, 3);
        CHECK(summary.tweet_ids == std::vector<std::string>{"t1", "t3", "t2"});
    }
}

TEST_SUITE("cowts") {
    TEST_CASE("greedy coverage prefers new content words") {
        const auto dataset = tokenized({{"flood", "river"},
                                        {"flood", "river", "bank"},
                                        {"rescu", "boat", "12"},
                                        {"flood", "bank"},
                                        {"zq"}});
        const auto summary = summarize(Method::Cowts, dataset, 3);
        // t2 covers flood(3) river(2) bank(2); t3 then adds three fresh words.
        CHECK(summary.tweet_ids[0] == "t2");
        CHECK(summary.tweet_ids[1] == "t3");
        SummarizerOptions options;
        options.cowts_pos_lexicon = std::unordered_set<std::string>{"boat"};
        CHECK(summarize(Method::Cowts, dataset, 1, options).tweet_ids[0] == "t3");
    }
}

TEST_SUITE("lexrank") {
    TEST_CASE("uniform complete graph") {
        for (std::size_t n : {3u, 5u}) {
            std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.4));
            const auto r = lexrank_scores(graph_of(w), 0.85, 1e-12);
            CHECK(r.converged);
            for (double s : r.scores) CHECK(s == doctest::Approx(1.0 / n).epsilon(1e-12));
        }
        const auto dataset = tokenized({{"a", "b"}, {"a", "b"}, {"a", "b"}, {"c"}});
        const auto summary = summarize(Method::LexRank, dataset, 2);
        CHECK(summary.tweet_ids == std::vector<std::string>{"t1", "t2"});
    }

    TEST_CASE("star graph matches the eigenvector") {
        const std::vector<std::vector<double>> w = {
            {0, 0.8, 0.8, 0.8}, {0.8, 0, 0, 0}, {0.8, 0, 0, 0}, {0.8, 0, 0, 0}};
        const auto r = lexrank_scores(graph_of(w), 0.85, 1e-14, 10000);
        const auto oracle = eigen_stationary(w, 0.85);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.scores[i] - oracle[i]) < 1e-9);
        for (std::size_t i = 1; i < 4; ++i) CHECK(r.scores[0] > r.scores[i]);
    }

    TEST_CASE("isolated node keeps the damping floor") {
        const std::vector<std::vector<double>> w = {{0, 1, 0}, {1, 0, 0}, {0, 0, 0}};
        const auto r = lexrank_scores(graph_of(w), 0.85, 1e-12);
        CHECK(r.scores[2] >= 0.15 / 3);
        double total = 0;
        for (double s : r.scores) total += s;
        CHECK(std::abs(total - 1.0) < 1e-6);
    }

    TEST_CASE("property: distribution, scale invariance, oracle") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 1 + rng() % 8;
            std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0)), half = w;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    const double x = rng() % 3 == 0 ? 0.0 : unit(rng);
                    w[i][j] = w[j][i] = x;
                    half[i][j] = half[j][i] = x * 0.5;
                }
            }
            const auto a = lexrank_scores(graph_of(w), 0.85, 1e-14, 10000);
            const auto b = lexrank_scores(graph_of(half), 0.85, 1e-14, 10000);
            double total = 0;
            for (double s : a.scores) total += s;
            CHECK(std::abs(total - 1.0) <= 1e-6);
            const auto oracle = eigen_stationary(w, 0.85);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(a.scores[i] - b.scores[i]) <= 1e-9);
                CHECK(std::abs(a.scores[i] - oracle[i]) <= 1e-9);
            }
        }
    }

    TEST_CASE("iteration cap and argument checks") {
        const std::vector<std::vector<double>> w = {{0, 1, 0}, {1, 0, 0.2}, {0, 0.2, 0}};
        const auto r = lexrank_scores(graph_of(w), 0.85, 1e-15, 1);
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 1);
        CHECK_THROWS_AS(lexrank_scores(graph_of(w), 1.0, 1e-6), Error);
        CHECK_THROWS_AS(lexrank_scores(SentenceGraph{}, 0.85, 1e-6), Error);
    }

    TEST_CASE("sentence graph thresholding") {
        const auto dataset = tokenized({{"a", "b"}, {"a", "c"}, {"d"}});
        const auto g = build_sentence_graph(dataset, tfidf_index(dataset), 0.1);
        CHECK(g.weights[0][1] == g.weights[1][0]);
        CHECK(g.weights[0][1] > 0.1);
        CHECK(g.weights[0][2] == 0.0);
        const auto strict = build_sentence_graph(dataset, tfidf_index(dataset), 0.99);
        CHECK(strict.weights[0][1] == 0.0);
    }
}

TEST_SUITE("lsa") {
    TEST_CASE("rank-one matrix follows magnitude") {
        const auto dataset = tokenized({{"a", "b"}, {"a", "a", "a", "b", "b", "b"}, {}, {"a", "a", "b", "b"}});
        const auto summary = lsa_select(dataset, 4);
        CHECK(summary.tweet_ids == std::vector<std::string>{"t2", "t4", "t1", "t3"});
    }

    TEST_CASE("orthogonal blocks alternate") {
        const auto dataset = tokenized({{"a", "b", "c"},
                                        {"a", "b", "c", "a"},
                                        {"a", "c"},
                                        {"x", "y"},
                                        {"x", "y", "y"},
                                        {"z"}});
        // Oracle: SVD of the tf-idf matrix assembled independently.
        std::map<std::string, int> df;
        for (const auto& t : dataset.tweets) for (const auto& w : std::set<std::string>(t.tokens.begin(), t.tokens.end())) ++df[w];
        std::vector<std::string> terms;
        for (const auto& [w, c] : df) terms.push_back(w);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(terms.size(), 6);
        for (int j = 0; j < 6; ++j) {
            for (const auto& w : dataset.tweets[j].tokens) {
                const auto r = std::find(terms.begin(), terms.end(), w) - terms.begin();
                a(r, j) += std::log(6.0 / df[w]);
            }
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
        const Eigen::MatrixXd v = svd.matrixV();
        int first = 0, second = -1;
        for (int j = 1; j < 6; ++j) if (std::abs(v(j, 0)) > std::abs(v(first, 0))) first = j;
        for (int j = 0; j < 6; ++j) {
            if (j == first) continue;
            if (second < 0 || std::abs(v(j, 1)) > std::abs(v(second, 1))) second = j;
        }
        const auto summary = lsa_select(dataset, 2);
        CHECK(summary.tweet_ids[0] == dataset.tweets[first].id);
        CHECK(summary.tweet_ids[1] == dataset.tweets[second].id);
        auto block = [](const std::string& id) { return id <= "t3" ? 0 : 1; };
        CHECK(block(summary.tweet_ids[0]) != block(summary.tweet_ids[1]));
    }

    TEST_CASE("all-zero matrix is rejected") {
        const auto dataset = tokenized({{"a"}, {"a"}});
        CHECK_THROWS_AS(lsa_select(dataset, 1), Error);
    }
}

TEST_SUITE("clustering methods") {
    TEST_CASE("clusterrank is seed-deterministic and spreads over clusters") {
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < 6; ++i) rows.push_back({"flood", "river", "zq" + std::to_string(i)});
        for (int i = 0; i < 6; ++i) rows.push_back({"pray", "god", "zr" + std::to_string(i)});
        const auto dataset = tokenized(rows);
        SummarizerOptions options;
        options.seed = 99;
        const auto a = summarize(Method::ClusterRank, dataset, 8, options);
        CHECK(a == summarize(Method::ClusterRank, dataset, 8, options));
        // Two clusters, round-robin: the first two picks come from both groups.
        auto group = [&](const std::string& id) { return dataset.find(id)->tokens[0]; };
        CHECK(group(a.tweet_ids[0]) != group(a.tweet_ids[1]));
    }

    TEST_CASE("mead skips near-duplicates while alternatives exist") {
        const auto dataset = tokenized({{"flood", "river", "bank"},
                                        {"flood", "river", "bank"},
                                        {"flood", "river", "bank"},
                                        {"pray", "god"},
                                        {"food", "water"},
                                        {"road", "bridg"}});
        const auto summary = summarize(Method::Mead, dataset, 4);
        int duplicates = 0;
        for (const auto& id : summary.tweet_ids) duplicates += id <= "t3";
        CHECK(duplicates == 1);
        CHECK(summarize(Method::Mead, dataset, 6).tweet_ids.size() == 6);
    }
}

TEST_SUITE("ontodsumm_lite and fusion") {
    TEST_CASE("budget allocation") {
        std::map<TopicLabel, std::size_t> sizes = {{TopicLabel::AffectedPopulation, 440},
                                                   {TopicLabel::EarlyWarning, 42},
                                                   {TopicLabel::HumanitarianEvent, 7},
                                                   {TopicLabel::Prayer, 638}};
        const auto alloc = allocate_budget(sizes, 40);
        std::size_t total = 0;
        for (const auto& [topic, count] : alloc) {
            total += count;
            CHECK(count >= 1);
            CHECK(count <= sizes[topic]);
        }
        CHECK(total == 40);
        CHECK(alloc.at(TopicLabel::Prayer) > alloc.at(TopicLabel::AffectedPopulation));
        const auto few = allocate_budget(sizes, 2);
        CHECK(few.size() == 2);
        CHECK(few.at(TopicLabel::Prayer) == 1);
        CHECK(few.at(TopicLabel::AffectedPopulation) == 1);
    }

    TEST_CASE("property: allocation sums to min(budget, total) within capacity") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 3000; ++trial) {
            std::map<TopicLabel, std::size_t> sizes;
            std::size_t total = 0;
            for (TopicLabel topic : kAllTopics) {
                if (topic == TopicLabel::Irrelevant || rng() % 3 == 0) continue;
                sizes[topic] = rng() % 30;
                total += sizes[topic];
            }
            const std::size_t budget = rng() % 80;
            const auto alloc = allocate_budget(sizes, budget);
            std::size_t sum = 0, nonempty = 0;
            for (const auto& [topic, size] : sizes) nonempty += size > 0;
            for (const auto& [topic, count] : alloc) {
                sum += count;
                CHECK(count <= sizes[topic]);
                CHECK(count >= 1);
            }
            CHECK(sum == std::min(budget, total));
            if (budget >= nonempty) CHECK(alloc.size() == nonempty);
        }
    }

    TEST_CASE("one tweet per covered topic before any second") {
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < 20; ++i) rows.push_back({"pray", "god", "zq" + std::to_string(i)});
        rows.push_back({"dead", "injur"});
        rows.push_back({"bridg", "damag"});
        const auto dataset = tokenized(rows);
        const auto summary = summarize(Method::OntoDSummLite, dataset, 3);
        std::set<std::string> ids(summary.tweet_ids.begin(), summary.tweet_ids.end());
        CHECK(summary.tweet_ids.size() == 3);
        CHECK(ids.count("t21") == 1);
        CHECK(ids.count("t22") == 1);
    }

    TEST_CASE("fusion over one method is that method") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            const auto dataset = random_dataset(rng, 10 + rng() % 20);
            for (Method m : {Method::Luhn, Method::LexRank, Method::Mead, Method::SumBasic}) {
                SummarizerOptions options;
                options.ensemble_pool = {m};
                const std::size_t budget = 1 + rng() % 10;
                CHECK(summarize(Method::EnsumLite, dataset, budget, options).tweet_ids ==
                      summarize(m, dataset, budget, options).tweet_ids);
            }
        }
        SummarizerOptions self;
        self.ensemble_pool = {Method::EnsumLite};
        CHECK_THROWS_AS(summarize(Method::EnsumLite, tokenized({{"a"}}), 1, self), Error);
    }

    TEST_CASE("reciprocal rank fusion by hand") {
        const auto dataset = tokenized({{"a"}, {"b"}, {"c"}, {"d"}});
        // t2: 1/61 + 1/61; t1: 1/62 + 1/63; t3: 1/62; t4: 1/63.
        const auto fused = reciprocal_rank_fusion({{"t2", "t1", "t4"}, {"t2", "t3", "t1"}}, dataset, 3);
        CHECK(fused == std::vector<std::string>{"t2", "t1", "t3"});
    }
}
