#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace conflictnet {

struct WeightedEdge {
    std::size_t u;
    std::size_t v;
    std::int64_t weight;

    friend bool operator==(const WeightedEdge &, const WeightedEdge &) = default;
};

struct NodeAttributes {
    std::string mode;
    std::string faction;

    friend bool operator==(const NodeAttributes &, const NodeAttributes &) = default;
};

/// Undirected, loop-free graph with nonnegative integer weights.
///
/// Weights are held densely; neighbor lists (positive-weight pairs, sorted by
/// index) are built once at construction. Every structural metric works on
/// the binarized graph given by those lists.
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// `weights` is a row-major n x n matrix. Throws std::invalid_argument
    /// unless it is symmetric, nonnegative, and zero on the diagonal.
    WeightedGraph(std::vector<std::string> ids, std::vector<std::int64_t> weights);

    /// Parallel edges accumulate. Throws on loops, negative weights, or bad indices.
    static WeightedGraph from_edges(std::vector<std::string> ids,
                                    std::span<const WeightedEdge> edges);

    std::size_t order() const noexcept { return ids_.size(); }
    /// Number of positive-weight pairs.
    std::size_t size() const noexcept { return edge_count_; }

    std::int64_t weight(std::size_t u, std::size_t v) const { return weights_[u * ids_.size() + v]; }
    const std::vector<std::size_t> &neighbors(std::size_t u) const { return adjacency_[u]; }
    std::size_t degree(std::size_t u) const { return adjacency_[u].size(); }
    std::int64_t strength(std::size_t u) const { return strengths_[u]; }
    /// Sum of weights over unordered pairs.
    std::int64_t total_weight() const noexcept { return total_weight_; }

    const std::vector<std::string> &ids() const noexcept { return ids_; }
    const std::vector<std::int64_t> &weights() const noexcept { return weights_; }

    const std::vector<NodeAttributes> &attributes() const noexcept { return attributes_; }
    void set_attributes(std::vector<NodeAttributes> attributes);

    /// Edges with u < v in index order.
    std::vector<WeightedEdge> edges() const;

    friend bool operator==(const WeightedGraph &a, const WeightedGraph &b) {
        return a.ids_ == b.ids_ && a.weights_ == b.weights_ && a.attributes_ == b.attributes_;
    }

private:
    void build_index();

    std::vector<std::string> ids_;
    std::vector<std::int64_t> weights_;
    std::vector<NodeAttributes> attributes_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::vector<std::int64_t> strengths_;
    std::size_t edge_count_ = 0;
    std::int64_t total_weight_ = 0;
};

} // namespace conflictnet
