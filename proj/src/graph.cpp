#include "conflictnet/graph.hpp"

#include <stdexcept>

namespace conflictnet {

WeightedGraph::WeightedGraph(std::vector<std::string> ids, std::vector<std::int64_t> weights)
    : ids_{std::move(ids)}, weights_{std::move(weights)} {
    const auto n = ids_.size();
    if (weights_.size() != n * n) {
        throw std::invalid_argument("weighted graph: weight matrix is not n x n");
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (weights_[u * n + u] != 0) {
            throw std::invalid_argument("weighted graph: nonzero diagonal at '" + ids_[u] + "'");
        }
        for (std::size_t v = u + 1; v < n; ++v) {
            const auto w = weights_[u * n + v];
            if (w < 0) {
                throw std::invalid_argument("weighted graph: negative weight");
            }
            if (w != weights_[v * n + u]) {
                throw std::invalid_argument("weighted graph: weight matrix is not symmetric");
            }
        }
    }
    attributes_.resize(n);
    build_index();
}

WeightedGraph WeightedGraph::from_edges(std::vector<std::string> ids,
                                        std::span<const WeightedEdge> edges) {
    const auto n = ids.size();
    std::vector<std::int64_t> weights(n * n, 0);
    for (const auto &e : edges) {
        if (e.u >= n || e.v >= n) {
            throw std::invalid_argument("weighted graph: edge endpoint out of range");
        }
        if (e.u == e.v) {
            throw std::invalid_argument("weighted graph: loop at '" + ids[e.u] + "'");
        }
        if (e.weight < 0) {
            throw std::invalid_argument("weighted graph: negative weight");
        }
        weights[e.u * n + e.v] += e.weight;
        weights[e.v * n + e.u] += e.weight;
    }
    return WeightedGraph{std::move(ids), std::move(weights)};
}

void WeightedGraph::set_attributes(std::vector<NodeAttributes> attributes) {
    if (attributes.size() != ids_.size()) {
        throw std::invalid_argument("weighted graph: attribute count does not match order");
    }
    attributes_ = std::move(attributes);
}

std::vector<WeightedEdge> WeightedGraph::edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count_);
    for (std::size_t u = 0; u < order(); ++u) {
        for (auto v : adjacency_[u]) {
            if (u < v) {
                out.push_back({u, v, weight(u, v)});
            }
        }
    }
    return out;
}

void WeightedGraph::build_index() {
    const auto n = ids_.size();
    adjacency_.assign(n, {});
    strengths_.assign(n, 0);
    edge_count_ = 0;
    total_weight_ = 0;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            const auto w = weights_[u * n + v];
            if (w > 0) {
                adjacency_[u].push_back(v);
                strengths_[u] += w;
                if (u < v) {
                    ++edge_count_;
                    total_weight_ += w;
                }
            }
        }
    }
}

} // namespace conflictnet
