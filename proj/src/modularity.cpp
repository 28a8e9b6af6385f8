#include "conflictnet/modularity.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

namespace conflictnet {

double modularity(const WeightedGraph &g, const Partition &p) {
    if (p.size() != g.order()) {
        throw std::invalid_argument("modularity: partition does not cover the graph");
    }
    if (g.total_weight() <= 0) {
        throw std::invalid_argument("modularity: graph has zero total weight");
    }
    const auto q = p.community_count();
    std::vector<double> internal(q, 0.0); // ordered-pair weight inside each community
    std::vector<double> strength(q, 0.0);
    for (std::size_t u = 0; u < g.order(); ++u) {
        strength[p.label(u)] += static_cast<double>(g.strength(u));
        for (auto v : g.neighbors(u)) {
            if (p.label(u) == p.label(v)) {
                internal[p.label(u)] += static_cast<double>(g.weight(u, v));
            }
        }
    }
    const double two_m = 2.0 * static_cast<double>(g.total_weight());
    double m = 0.0;
    for (std::size_t c = 0; c < q; ++c) {
        const double share = strength[c] / two_m;
        m += internal[c] / two_m - share * share;
    }
    return m;
}

FastGreedyResult fast_greedy(const WeightedGraph &g) {
    if (g.total_weight() <= 0) {
        throw std::invalid_argument("fast greedy: graph has zero total weight");
    }
    const auto n = g.order();
    const std::int64_t two_m = 2 * g.total_weight();

    // Integer bookkeeping: gains and modularity scaled by (2m)^2 compare exactly.
    std::vector<std::map<std::size_t, std::int64_t>> between(n); // unordered weight to neighbors
    std::vector<std::int64_t> strength(n);
    std::vector<bool> alive(n, true);
    for (std::size_t u = 0; u < n; ++u) {
        strength[u] = g.strength(u);
        for (auto v : g.neighbors(u)) {
            between[u][v] = g.weight(u, v);
        }
    }
    std::int64_t scaled = 0;
    for (std::size_t u = 0; u < n; ++u) {
        scaled -= strength[u] * strength[u];
    }

    FastGreedyResult result;
    std::int64_t best_scaled = scaled;
    const double scale = static_cast<double>(two_m) * static_cast<double>(two_m);
    while (true) {
        bool found = false;
        std::int64_t best_gain = 0;
        std::size_t best_a = 0;
        std::size_t best_b = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!alive[a]) {
                continue;
            }
            for (const auto &[b, w] : between[a]) {
                if (b <= a) {
                    continue;
                }
                // delta Q * (2m)^2 = 2 (w_ab 2m - K_a K_b)
                const std::int64_t gain = 2 * (w * two_m - strength[a] * strength[b]);
                if (!found || gain > best_gain) {
                    found = true;
                    best_gain = gain;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (!found) {
            break;
        }
        const auto a = best_a;
        const auto b = best_b;
        strength[a] += strength[b];
        between[a].erase(b);
        between[b].erase(a);
        for (const auto &[c, w] : between[b]) {
            between[a][c] += w;
            between[c].erase(b);
            between[c][a] += w;
        }
        between[b].clear();
        alive[b] = false;
        scaled += best_gain;
        result.dendrogram.push_back({a, b, static_cast<double>(best_gain) / scale,
                                     static_cast<double>(scaled) / scale});
        if (scaled > best_scaled) {
            best_scaled = scaled;
            result.cut = result.dendrogram.size();
        }
    }

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x];
        }
        return x;
    };
    for (std::size_t k = 0; k < result.cut; ++k) {
        parent[find(result.dendrogram[k].absorbed)] = find(result.dendrogram[k].kept);
    }
    std::vector<std::size_t> labels(n);
    for (std::size_t u = 0; u < n; ++u) {
        labels[u] = find(u);
    }
    result.partition = Partition{labels};
    result.modularity = modularity(g, result.partition);
    return result;
}

} // namespace conflictnet
