#include <algorithm>
#include <cmath>
#include <numeric>

#include "summarizers/internal.hpp"

namespace crisisgt::detail {

namespace {

struct Merge {
    std::size_t a;
    std::size_t b;
    double height;
};

// Average-linkage agglomerative clustering by the nearest-neighbour chain.
// Returns the n - 1 merges in order of increasing height.
std::vector<Merge> average_linkage(std::vector<std::vector<double>> dist) {
    const std::size_t n = dist.size();
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<Merge> merges;
    std::vector<std::size_t> chain;
    while (merges.size() + 1 < n) {
        if (chain.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (active[i]) {
                    chain.push_back(i);
                    break;
                }
            }
        }
        const std::size_t top = chain.back();
        const std::size_t prev = chain.size() > 1 ? chain[chain.size() - 2] : n;
        // The previous chain element wins ties, which keeps the chain finite.
        std::size_t nearest = prev;
        double best = prev < n ? dist[top][prev] : 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == top) continue;
            if (nearest == n || dist[top][j] < best) {
                best = dist[top][j];
                nearest = j;
            }
        }
        if (nearest != prev) {
            chain.push_back(nearest);
            continue;
        }
        chain.pop_back();
        chain.pop_back();
        const std::size_t keep = std::min(top, prev);
        const std::size_t drop = std::max(top, prev);
        merges.push_back({keep, drop, best});
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || j == keep || j == drop) continue;
            const double d = (static_cast<double>(size[keep]) * dist[keep][j] +
                              static_cast<double>(size[drop]) * dist[drop][j]) /
                             static_cast<double>(size[keep] + size[drop]);
            dist[keep][j] = d;
            dist[j][keep] = d;
        }
        size[keep] += size[drop];
        active[drop] = false;
    }
    std::stable_sort(merges.begin(), merges.end(), [](const Merge& x, const Merge& y) { return x.height < y.height; });
    return merges;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

Positions mead(const Dataset& dataset, const TermIndex& index, std::size_t k, const SummarizerOptions& options) {
    const std::size_t n = dataset.tweets.size();
    const std::size_t clusters = cluster_count(k, n);
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            dist[i][j] = dist[j][i] = 1.0 - index.cosine(i, j);
        }
    }

    // Replaying merges by height with union-find and stopping at the target
    // count yields the dendrogram cut. The cluster root is the smallest index
    // the merge keeps, so merges name cluster representatives.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    const auto merges = n > 1 ? average_linkage(dist) : std::vector<Merge>{};
    std::size_t remaining = n;
    for (const Merge& m : merges) {
        if (remaining <= clusters) break;
        const std::size_t ra = find_root(parent, m.a);
        const std::size_t rb = find_root(parent, m.b);
        parent[std::max(ra, rb)] = std::min(ra, rb);
        --remaining;
    }

    std::vector<Positions> groups;
    std::vector<std::size_t> group_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find_root(parent, i);
        if (group_of[root] == n) {
            group_of[root] = groups.size();
            groups.emplace_back();
        }
        groups[group_of[root]].push_back(i);
    }

    // Centrality: cosine to the mean unit vector of the cluster.
    std::vector<double> centrality(n, 0.0);
    for (auto& members : groups) {
        std::vector<double> centroid(index.vocabulary_size(), 0.0);
        for (std::size_t i : members) {
            const auto row = dense_unit_row(index, i);
            for (std::size_t t = 0; t < row.size(); ++t) centroid[t] += row[t];
        }
        double cn = 0.0;
        for (double x : centroid) cn += x * x;
        cn = std::sqrt(cn);
        for (std::size_t i : members) {
            const auto& w = index.weights(i);
            const double rn = std::sqrt(w.squared_norm());
            if (rn <= 0.0 || cn <= 0.0) continue;
            double dot = 0.0;
            for (const auto& [term, x] : w.entries) dot += x * centroid[term];
            centrality[i] = dot / (rn * cn);
        }
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) { return centrality[a] > centrality[b]; });
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const Positions& a, const Positions& b) { return a.size() > b.size(); });

    std::vector<bool> taken(n, false);
    Positions picked;
    auto redundant = [&](std::size_t i) {
        for (std::size_t s : picked) {
            if (index.cosine(i, s) >= options.mead_redundancy) return true;
        }
        return false;
    };
    while (picked.size() < k) {
        bool added = false;
        for (const auto& members : groups) {
            if (picked.size() >= k) break;
            for (std::size_t i : members) {
                if (taken[i] || redundant(i)) continue;
                taken[i] = true;
                picked.push_back(i);
                added = true;
                break;
            }
        }
        if (added) continue;
        // Everything left is redundant: fall back to centrality alone.
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i] && (!best || centrality[i] > centrality[*best])) best = i;
        }
        taken[*best] = true;
        picked.push_back(*best);
    }
    return picked;
}

}  // namespace crisisgt::detail
