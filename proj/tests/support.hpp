#pragma once

#include "conflictnet/graph.hpp"
#include "conflictnet/incidence.hpp"
#include "conflictnet/partition.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testutil {

using conflictnet::IncidenceMatrix;
using conflictnet::Partition;
using conflictnet::WeightedGraph;

inline std::vector<std::string> numbered(const std::string &prefix, std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(prefix + std::to_string(i + 1000));
    }
    return ids;
}

inline WeightedGraph graph_from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges,
                                      std::int64_t weight = 1) {
    std::vector<std::int64_t> w(n * n, 0);
    for (auto [u, v] : edges) {
        w[u * n + v] = weight;
        w[v * n + u] = weight;
    }
    return WeightedGraph{numbered("v", n), std::move(w)};
}

inline WeightedGraph complete_graph(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return graph_from_edges(n, edges);
}

inline WeightedGraph path_graph(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return graph_from_edges(n, edges);
}

inline WeightedGraph cycle_graph(std::size_t n) {
    auto edges = std::vector<std::pair<std::size_t, std::size_t>>{};
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return graph_from_edges(n, edges);
}

inline WeightedGraph star_graph(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
    return graph_from_edges(n, edges);
}

/// Erdos-Renyi with integer weights in [1, max_weight].
inline WeightedGraph random_graph(std::size_t n, double p, std::mt19937_64 &rng, std::int64_t max_weight = 1) {
    std::bernoulli_distribution edge{p};
    std::uniform_int_distribution<std::int64_t> weight{1, max_weight};
    std::vector<std::int64_t> w(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (edge(rng)) w[i * n + j] = w[j * n + i] = weight(rng);
    return WeightedGraph{numbered("v", n), std::move(w)};
}

/// Random incidence matrix in which every row and column has a positive entry.
inline IncidenceMatrix random_incidence(std::size_t rows, std::size_t cols, std::mt19937_64 &rng, double p = 0.3,
                                        std::int64_t max_count = 1) {
    std::bernoulli_distribution hit{p};
    std::uniform_int_distribution<std::int64_t> count{1, max_count};
    std::uniform_int_distribution<std::size_t> pick_col{0, cols - 1}, pick_row{0, rows - 1};
    std::vector<std::int64_t> e(rows * cols, 0);
    for (auto &x : e)
        if (hit(rng)) x = count(rng);
    for (std::size_t i = 0; i < rows; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < cols; ++j) any = any || e[i * cols + j] > 0;
        if (!any) e[i * cols + pick_col(rng)] = count(rng);
    }
    for (std::size_t j = 0; j < cols; ++j) {
        bool any = false;
        for (std::size_t i = 0; i < rows; ++i) any = any || e[i * cols + j] > 0;
        if (!any) e[pick_row(rng) * cols + j] = count(rng);
    }
    return IncidenceMatrix{numbered("m", rows), numbered("e", cols), std::move(e)};
}

inline bool adjacent(const WeightedGraph &g, std::size_t u, std::size_t v) { return g.weight(u, v) > 0; }

/// All inclusion-maximal cliques by checking every vertex subset.
inline std::vector<std::vector<std::size_t>> brute_force_maximal_cliques(const WeightedGraph &g) {
    const auto n = g.order();
    std::vector<std::uint32_t> cliques;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        bool complete = true;
        for (std::size_t u = 0; u < n && complete; ++u)
            for (std::size_t v = u + 1; v < n && complete; ++v)
                if ((mask >> u & 1) && (mask >> v & 1) && !adjacent(g, u, v)) complete = false;
        if (complete) cliques.push_back(mask);
    }
    std::vector<std::vector<std::size_t>> maximal;
    for (auto c : cliques) {
        bool extendable = false;
        for (std::size_t w = 0; w < n && !extendable; ++w) {
            if (c >> w & 1) continue;
            bool joins = true;
            for (std::size_t u = 0; u < n && joins; ++u)
                if ((c >> u & 1) && !adjacent(g, u, w)) joins = false;
            extendable = joins;
        }
        if (!extendable) {
            std::vector<std::size_t> members;
            for (std::size_t u = 0; u < n; ++u)
                if (c >> u & 1) members.push_back(u);
            maximal.push_back(members);
        }
    }
    std::sort(maximal.begin(), maximal.end());
    return maximal;
}

/// Every set partition of {0..n-1} as restricted growth strings.
inline void for_each_set_partition(std::size_t n, const std::function<void(const std::vector<std::size_t> &)> &f) {
    std::vector<std::size_t> labels(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            f(labels);
            return;
        }
        for (std::size_t c = 0; c <= used && c < n; ++c) {
            labels[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0) {
        f(labels);
        return;
    }
    rec(0, 0);
}

/// Modularity from the double sum over ordered pairs.
inline double modularity_oracle(const WeightedGraph &g, const std::vector<std::size_t> &labels) {
    const auto n = g.order();
    double two_m = 0.0;
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += static_cast<double>(g.weight(i, j));
            two_m += static_cast<double>(g.weight(i, j));
        }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (labels[i] == labels[j]) q += static_cast<double>(g.weight(i, j)) - k[i] * k[j] / two_m;
    return q / two_m;
}

struct PlantedGraph {
    WeightedGraph graph;
    std::vector<std::size_t> labels;
};

/// Poisson block model with equal blocks in node order.
inline PlantedGraph planted_poisson(std::size_t n, std::size_t q, double within, double between,
                                    std::uint64_t seed) {
    std::mt19937_64 rng{seed};
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i * q / n;
    std::vector<std::int64_t> w(n * n, 0);
    std::poisson_distribution<std::int64_t> inside{within}, across{between};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto y = labels[i] == labels[j] ? inside(rng) : across(rng);
            w[i * n + j] = w[j * n + i] = y;
        }
    return {WeightedGraph{numbered("v", n), std::move(w)}, labels};
}

} // namespace testutil
