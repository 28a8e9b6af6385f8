#include "conflictnet/projection.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace conflictnet {

namespace {

/// Adjacency lists of an induced subgraph, reindexed 0..k-1.
std::vector<std::vector<std::size_t>> induced_adjacency(const WeightedGraph &g,
                                                        const std::vector<std::size_t> &nodes) {
    std::vector<std::size_t> local(g.order(), g.order());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        local[nodes[k]] = k;
    }
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        for (auto v : g.neighbors(nodes[k])) {
            if (local[v] != g.order()) {
                adj[k].push_back(local[v]);
            }
        }
    }
    return adj;
}

std::vector<std::size_t> all_nodes(const WeightedGraph &g) {
    std::vector<std::size_t> nodes(g.order());
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    return nodes;
}

/// Largest component; ties go to the one holding the smallest index.
std::vector<std::size_t> giant_component(const WeightedGraph &g) {
    const auto labels = component_labels(g);
    const auto count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(count, 0);
    for (auto l : labels) {
        ++sizes[l];
    }
    const auto best = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        if (labels[v] == best) {
            nodes.push_back(v);
        }
    }
    return nodes;
}

std::vector<double> brandes(const std::vector<std::vector<std::size_t>> &adj) {
    const auto n = adj.size();
    std::vector<double> centrality(n, 0.0);
    std::vector<std::size_t> order;
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<long> dist(n);
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
        order.clear();
        for (auto &p : preds) {
            p.clear();
        }
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (auto w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            for (auto v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if (w != s) {
                centrality[w] += delta[w];
            }
        }
    }
    for (auto &c : centrality) {
        c /= 2.0;
    }
    return centrality;
}

/// Closeness (k-1) / sum of distances on a connected adjacency.
std::vector<double> closeness(const std::vector<std::vector<std::size_t>> &adj) {
    const auto n = adj.size();
    std::vector<double> out(n, 0.0);
    std::vector<long> dist(n);
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        queue.push_back(s);
        long total = 0;
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            total += dist[v];
            for (auto w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        out[s] = total > 0 ? static_cast<double>(n - 1) / static_cast<double>(total) : 0.0;
    }
    return out;
}

double shortfall(const std::vector<double> &scores) {
    const auto top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (auto c : scores) {
        sum += top - c;
    }
    return sum;
}

void bron_kerbosch(const WeightedGraph &g, std::vector<std::size_t> &clique,
                   std::vector<std::size_t> candidates, std::vector<std::size_t> excluded,
                   std::vector<std::vector<std::size_t>> &out) {
    if (candidates.empty() && excluded.empty()) {
        out.push_back(clique);
        return;
    }
    auto adjacent = [&](std::size_t a, std::size_t b) { return g.weight(a, b) > 0; };

    std::size_t pivot = candidates.empty() ? excluded.front() : candidates.front();
    std::size_t best = 0;
    for (const auto *pool : {&candidates, &excluded}) {
        for (auto u : *pool) {
            std::size_t hits = 0;
            for (auto v : candidates) {
                hits += adjacent(u, v) ? 1 : 0;
            }
            if (hits > best) {
                best = hits;
                pivot = u;
            }
        }
    }

    std::vector<std::size_t> branch;
    for (auto v : candidates) {
        if (!adjacent(pivot, v)) {
            branch.push_back(v);
        }
    }
    for (auto v : branch) {
        std::vector<std::size_t> next_candidates;
        std::vector<std::size_t> next_excluded;
        for (auto u : candidates) {
            if (adjacent(v, u)) {
                next_candidates.push_back(u);
            }
        }
        for (auto u : excluded) {
            if (adjacent(v, u)) {
                next_excluded.push_back(u);
            }
        }
        clique.push_back(v);
        bron_kerbosch(g, clique, std::move(next_candidates), std::move(next_excluded), out);
        clique.pop_back();
        candidates.erase(std::find(candidates.begin(), candidates.end(), v));
        excluded.push_back(v);
    }
}

/// Nodes in nondecreasing order of remaining degree while peeling.
std::vector<std::size_t> degeneracy_order(const WeightedGraph &g, std::vector<std::size_t> *cores) {
    const auto n = g.order();
    std::vector<std::size_t> degree(n);
    std::size_t max_degree = 0;
    for (std::size_t v = 0; v < n; ++v) {
        degree[v] = g.degree(v);
        max_degree = std::max(max_degree, degree[v]);
    }
    // Bucket sort by degree (Batagelj-Zaversnik).
    std::vector<std::size_t> bin(max_degree + 1, 0);
    for (auto d : degree) {
        ++bin[d];
    }
    std::size_t start = 0;
    for (auto &b : bin) {
        const auto count = b;
        b = start;
        start += count;
    }
    std::vector<std::size_t> vert(n);
    std::vector<std::size_t> pos(n);
    for (std::size_t v = 0; v < n; ++v) {
        pos[v] = bin[degree[v]]++;
        vert[pos[v]] = v;
    }
    for (std::size_t d = max_degree; d > 0; --d) {
        bin[d] = bin[d - 1];
    }
    if (!bin.empty()) {
        bin[0] = 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = vert[i];
        for (auto u : g.neighbors(v)) {
            if (degree[u] > degree[v]) {
                const auto du = degree[u];
                const auto pu = pos[u];
                const auto pw = bin[du];
                const auto w = vert[pw];
                if (u != w) {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                ++bin[du];
                --degree[u];
            }
        }
    }
    if (cores != nullptr) {
        *cores = std::move(degree);
    }
    return vert;
}

} // namespace

WeightedGraph project(const IncidenceMatrix &a, Side side) {
    const bool onto_rows = side == Side::municipalities;
    const auto n = onto_rows ? a.n_rows() : a.n_cols();
    const auto other = onto_rows ? a.n_cols() : a.n_rows();
    auto present = [&](std::size_t node, std::size_t counterpart) {
        return (onto_rows ? a.at(node, counterpart) : a.at(counterpart, node)) > 0;
    };

    // Accumulate per counterpart: every pair of its nodes shares it.
    std::vector<std::int64_t> weights(n * n, 0);
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < other; ++c) {
        members.clear();
        for (std::size_t k = 0; k < n; ++k) {
            if (present(k, c)) {
                members.push_back(k);
            }
        }
        for (std::size_t x = 0; x < members.size(); ++x) {
            for (std::size_t y = x + 1; y < members.size(); ++y) {
                ++weights[members[x] * n + members[y]];
                ++weights[members[y] * n + members[x]];
            }
        }
    }
    WeightedGraph g{onto_rows ? a.rows() : a.cols(), std::move(weights)};
    std::vector<NodeAttributes> attributes(n, {onto_rows ? "municipality" : "structure", ""});
    g.set_attributes(std::move(attributes));
    return g;
}

double graph_density(const WeightedGraph &g) {
    const auto n = g.order();
    if (n < 2) {
        throw std::invalid_argument("density requires at least two nodes");
    }
    return static_cast<double>(g.size()) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double global_transitivity(const WeightedGraph &g) {
    double closed = 0.0;  // ordered triangle incidences: each triangle counted 6 times
    double triples = 0.0; // connected triples centred at a node
    for (std::size_t v = 0; v < g.order(); ++v) {
        const auto &nbrs = g.neighbors(v);
        const auto d = static_cast<double>(nbrs.size());
        triples += d * (d - 1.0) / 2.0;
        for (auto u : nbrs) {
            const auto &other = g.neighbors(u);
            std::size_t shared = 0;
            auto i = nbrs.begin();
            auto j = other.begin();
            while (i != nbrs.end() && j != other.end()) {
                if (*i < *j) {
                    ++i;
                } else if (*j < *i) {
                    ++j;
                } else {
                    ++shared;
                    ++i;
                    ++j;
                }
            }
            closed += static_cast<double>(shared);
        }
    }
    if (triples == 0.0) {
        return 0.0;
    }
    // closed / 6 triangles, times 3, over triples.
    return (closed / 2.0) / triples;
}

std::vector<double> local_clustering(const WeightedGraph &g) {
    std::vector<double> out(g.order(), 0.0);
    for (std::size_t v = 0; v < g.order(); ++v) {
        const auto &nbrs = g.neighbors(v);
        const auto d = nbrs.size();
        if (d < 2) {
            continue;
        }
        std::size_t links = 0;
        for (std::size_t x = 0; x < d; ++x) {
            for (std::size_t y = x + 1; y < d; ++y) {
                links += g.weight(nbrs[x], nbrs[y]) > 0 ? 1 : 0;
            }
        }
        out[v] = static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
    }
    return out;
}

std::string_view to_string(CentralizationKind kind) noexcept {
    switch (kind) {
    case CentralizationKind::degree:
        return "degree";
    case CentralizationKind::closeness:
        return "closeness";
    case CentralizationKind::betweenness:
        return "betweenness";
    }
    return "unknown";
}

CentralizationResult centralization(const WeightedGraph &g, CentralizationKind kind) {
    if (g.order() < 3) {
        throw std::invalid_argument("centralization requires at least three nodes");
    }
    CentralizationResult result;
    if (kind == CentralizationKind::degree) {
        const auto n = static_cast<double>(g.order());
        std::vector<double> degrees(g.order());
        for (std::size_t v = 0; v < g.order(); ++v) {
            degrees[v] = static_cast<double>(g.degree(v));
        }
        result.value = shortfall(degrees) / ((n - 1.0) * (n - 2.0));
        result.nodes_used = g.order();
        return result;
    }

    auto nodes = giant_component(g);
    result.giant_component_only = nodes.size() < g.order();
    result.nodes_used = nodes.size();
    if (nodes.size() < 3) {
        return result;
    }
    const auto adj = induced_adjacency(g, nodes);
    const auto n = static_cast<double>(nodes.size());
    if (kind == CentralizationKind::closeness) {
        result.value = shortfall(closeness(adj)) / ((n - 1.0) * (n - 2.0) / (2.0 * n - 3.0));
    } else {
        result.value = shortfall(brandes(adj)) / ((n - 1.0) * (n - 1.0) * (n - 2.0) / 2.0);
    }
    return result;
}

std::vector<double> betweenness_centrality(const WeightedGraph &g) {
    return brandes(induced_adjacency(g, all_nodes(g)));
}

CliqueEnumeration maximal_cliques(const WeightedGraph &g) {
    CliqueEnumeration result;
    const auto order = degeneracy_order(g, nullptr);
    std::vector<std::size_t> rank(g.order());
    for (std::size_t k = 0; k < order.size(); ++k) {
        rank[order[k]] = k;
    }
    std::vector<std::size_t> clique;
    for (auto v : order) {
        std::vector<std::size_t> candidates;
        std::vector<std::size_t> excluded;
        for (auto u : g.neighbors(v)) {
            (rank[u] > rank[v] ? candidates : excluded).push_back(u);
        }
        clique.assign(1, v);
        bron_kerbosch(g, clique, std::move(candidates), std::move(excluded), result.cliques);
    }
    for (auto &c : result.cliques) {
        std::sort(c.begin(), c.end());
        result.clique_number = std::max(result.clique_number, c.size());
        ++result.size_distribution[c.size()];
    }
    std::sort(result.cliques.begin(), result.cliques.end());
    return result;
}

std::vector<std::size_t> core_decomposition(const WeightedGraph &g) {
    std::vector<std::size_t> cores;
    degeneracy_order(g, &cores);
    return cores;
}

std::vector<std::size_t> component_labels(const WeightedGraph &g) {
    const auto n = g.order();
    std::vector<std::size_t> labels(n, n);
    std::vector<std::size_t> stack;
    std::size_t next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (labels[s] != n) {
            continue;
        }
        labels[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (auto u : g.neighbors(v)) {
                if (labels[u] == n) {
                    labels[u] = next;
                    stack.push_back(u);
                }
            }
        }
        ++next;
    }
    return labels;
}

ComponentSummary graph_components(const WeightedGraph &g) {
    const auto labels = component_labels(g);
    ComponentSummary summary;
    if (labels.empty()) {
        return summary;
    }
    summary.component_count = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::size_t> sizes(summary.component_count, 0);
    for (auto l : labels) {
        ++sizes[l];
    }
    summary.giant_order = *std::max_element(sizes.begin(), sizes.end());
    return summary;
}

} // namespace conflictnet
