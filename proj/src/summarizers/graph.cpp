#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "crisisgt/error.hpp"
#include "crisisgt/random.hpp"
#include "summarizers/internal.hpp"

namespace crisisgt {

SentenceGraph build_sentence_graph(const Dataset& dataset, const TermIndex& index, double threshold) {
    SentenceGraph graph;
    graph.threshold = threshold;
    const std::size_t n = dataset.tweets.size();
    graph.weights.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        graph.nodes.push_back(dataset.tweets[i].id);
        const std::size_t pi = *index.position(dataset.tweets[i].id);
        for (std::size_t j = 0; j < i; ++j) {
            const double sim = index.cosine(pi, *index.position(dataset.tweets[j].id));
            const double w = sim >= threshold ? std::max(0.0, sim) : 0.0;
            graph.weights[i][j] = w;
            graph.weights[j][i] = w;
        }
    }
    return graph;
}

LexRankResult lexrank_scores(const SentenceGraph& graph, double damping, double epsilon,
                             std::size_t max_iterations) {
    const std::size_t n = graph.nodes.size();
    if (n == 0) throw Error(ErrorCode::EmptyInput, "LexRank needs a non-empty graph");
    if (!(damping > 0.0 && damping < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("damping {} is outside (0, 1)", damping));
    }
    if (graph.weights.size() != n) throw Error(ErrorCode::InvalidArgument, "graph weights do not match its nodes");

    std::vector<double> row_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (graph.weights[i].size() != n) throw Error(ErrorCode::InvalidArgument, "graph weights must be square");
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) row_sum[i] += graph.weights[i][j];
        }
    }
    const double uniform = 1.0 / static_cast<double>(n);
    LexRankResult result;
    std::vector<double> p(n, uniform), next(n);
    while (result.iterations < max_iterations) {
        ++result.iterations;
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (row_sum[i] <= 0.0) dangling += p[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            double inflow = dangling * uniform;
            for (std::size_t i = 0; i < n; ++i) {
                if (i != j && row_sum[i] > 0.0) inflow += p[i] * graph.weights[i][j] / row_sum[i];
            }
            next[j] = (1.0 - damping) * uniform + damping * inflow;
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) delta = std::max(delta, std::abs(next[j] - p[j]));
        std::swap(p, next);
        if (delta < epsilon) {
            result.converged = true;
            break;
        }
    }
    double total = 0.0;
    for (double x : p) total += x;
    for (double& x : p) x /= total;
    result.scores = std::move(p);
    if (!result.converged) {
        spdlog::warn("LexRank did not converge within {} iterations", max_iterations);
    }
    return result;
}

namespace detail {

std::size_t cluster_count(std::size_t budget, std::size_t n) {
    return std::clamp<std::size_t>((budget + 3) / 4, 1, std::max<std::size_t>(n, 1));
}

std::vector<double> dense_unit_row(const TermIndex& index, std::size_t i) {
    std::vector<double> row(index.vocabulary_size(), 0.0);
    const auto& weights = index.weights(i);
    const double norm = std::sqrt(weights.squared_norm());
    if (norm <= 0.0) return row;
    for (const auto& [term, w] : weights.entries) row[term] = w / norm;
    return row;
}

Positions lexrank(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options) {
    const auto graph = build_sentence_graph(dataset, index, options.lexrank_threshold);
    const auto result = lexrank_scores(graph, options.lexrank_damping, options.lexrank_epsilon,
                                       options.lexrank_max_iterations);
    return top_k(result.scores, k);
}

namespace {

double dot_sparse_dense(const SparseVector& row, double row_norm, const std::vector<double>& dense) {
    if (row_norm <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& [term, w] : row.entries) sum += w * dense[term];
    return sum / row_norm;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

Positions clusterrank(const Dataset& dataset, const TermIndex& index, std::size_t k,
                      const SummarizerOptions& options) {
    const std::size_t n = dataset.tweets.size();
    const std::size_t clusters = cluster_count(k, n);
    const std::size_t vocab = index.vocabulary_size();
    std::vector<double> row_norm(n);
    for (std::size_t i = 0; i < n; ++i) row_norm[i] = std::sqrt(index.weights(i).squared_norm());

    // Cosine between a tweet and a centroid of any length.
    auto cos_to = [&](std::size_t i, const std::vector<double>& centroid, double centroid_norm) {
        if (centroid_norm <= 0.0) return 0.0;
        return dot_sparse_dense(index.weights(i), row_norm[i], centroid) / centroid_norm;
    };

    // k-means++ seeding on cosine distance.
    Rng rng(options.seed);
    std::vector<std::vector<double>> centers;
    std::vector<double> center_norm;
    std::vector<bool> is_center(n, false);
    auto add_center = [&](std::size_t i) {
        is_center[i] = true;
        centers.push_back(dense_unit_row(index, i));
        center_norm.push_back(norm(centers.back()));
    };
    add_center(static_cast<std::size_t>(uniform_below(rng, n)));
    std::vector<double> dist(n);
    while (centers.size() < clusters) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = 0.0;
            for (std::size_t c = 0; c < centers.size(); ++c) best = std::max(best, cos_to(i, centers[c], center_norm[c]));
            dist[i] = is_center[i] ? 0.0 : (1.0 - best) * (1.0 - best);
            total += dist[i];
        }
        std::size_t chosen = n;
        if (total > 0.0) {
            double target = uniform_unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[i] <= 0.0) continue;
                chosen = i;
                if (target < dist[i]) break;
                target -= dist[i];
            }
        } else {
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_center[i]) rest.push_back(i);
            }
            chosen = rest[uniform_below(rng, rest.size())];
        }
        add_center(chosen);
    }

    // Lloyd iterations.
    std::vector<std::size_t> assign(n, clusters);
    for (int iteration = 0; iteration < 100; ++iteration) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_cos = -2.0;
            for (std::size_t c = 0; c < clusters; ++c) {
                const double cs = cos_to(i, centers[c], center_norm[c]);
                if (cs > best_cos) {
                    best_cos = cs;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        for (std::size_t c = 0; c < clusters; ++c) {
            std::vector<double> sum(vocab, 0.0);
            std::size_t members = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != c || row_norm[i] <= 0.0) continue;
                for (const auto& [term, w] : index.weights(i).entries) sum[term] += w / row_norm[i];
                ++members;
            }
            if (members == 0) continue;
            for (double& x : sum) x /= static_cast<double>(members);
            centers[c] = std::move(sum);
            center_norm[c] = norm(centers[c]);
        }
    }

    // Rank clusters by centrality over the centroid similarity graph.
    SentenceGraph cluster_graph;
    cluster_graph.weights.assign(clusters, std::vector<double>(clusters, 0.0));
    for (std::size_t a = 0; a < clusters; ++a) {
        cluster_graph.nodes.push_back(std::to_string(a));
        for (std::size_t b = 0; b < clusters; ++b) {
            if (a == b || center_norm[a] <= 0.0 || center_norm[b] <= 0.0) continue;
            double dot = 0.0;
            for (std::size_t t = 0; t < vocab; ++t) dot += centers[a][t] * centers[b][t];
            cluster_graph.weights[a][b] = std::max(0.0, dot / (center_norm[a] * center_norm[b]));
        }
    }
    const auto cluster_scores =
        lexrank_scores(cluster_graph, options.lexrank_damping, options.lexrank_epsilon, options.lexrank_max_iterations)
            .scores;
    const Positions cluster_order = top_k(cluster_scores, clusters);

    std::vector<Positions> members(clusters);
    for (std::size_t c = 0; c < clusters; ++c) {
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i] == c) scored.emplace_back(cos_to(i, centers[c], center_norm[c]), i);
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [score, i] : scored) members[c].push_back(i);
    }
    Positions picked;
    for (std::size_t round = 0; picked.size() < k; ++round) {
        bool any = false;
        for (std::size_t c : cluster_order) {
            if (round < members[c].size() && picked.size() < k) {
                picked.push_back(members[c][round]);
                any = true;
            }
        }
        if (!any) break;
    }
    return picked;
}

}  // namespace detail

}  // namespace crisisgt
