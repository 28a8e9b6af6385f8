#pragma once

#include "conflictnet/bipartite.hpp"
#include "conflictnet/graph.hpp"
#include "conflictnet/incidence.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace conflictnet {

/// One-mode projection of the binarized incidence matrix. Weight (i, j) is the
/// number of counterpart nodes shared by i and j; the diagonal is dropped.
WeightedGraph project(const IncidenceMatrix &a, Side side);

/// Positive-weight pairs over n(n-1)/2. Throws for fewer than two nodes.
double graph_density(const WeightedGraph &g);

/// 3 x triangles / connected triples; 0 when there are no triples.
double global_transitivity(const WeightedGraph &g);

/// Per-node local clustering coefficient; nodes of degree < 2 get 0.
std::vector<double> local_clustering(const WeightedGraph &g);

enum class CentralizationKind { degree, closeness, betweenness };

std::string_view to_string(CentralizationKind kind) noexcept;

struct CentralizationResult {
    double value = 0.0;
    /// Order of the graph the index was computed on.
    std::size_t nodes_used = 0;
    /// True when a disconnected graph was reduced to its giant component.
    bool giant_component_only = false;
};

/// Freeman centralization on the binarized graph, normalized by the star of
/// the same order. Closeness and betweenness use the giant component when the
/// graph is disconnected; a component of order < 3 yields 0. Throws for fewer
/// than three nodes.
CentralizationResult centralization(const WeightedGraph &g, CentralizationKind kind);

/// Unnormalized betweenness (unordered pairs) from Brandes' algorithm.
std::vector<double> betweenness_centrality(const WeightedGraph &g);

struct CliqueEnumeration {
    /// Each clique ascending; list in lexicographic order.
    std::vector<std::vector<std::size_t>> cliques;
    std::size_t clique_number = 0;
    /// clique size -> number of maximal cliques of that size
    std::map<std::size_t, std::size_t> size_distribution;
};

/// Bron-Kerbosch with pivoting over a degeneracy ordering. Isolated nodes are
/// reported as singleton cliques.
CliqueEnumeration maximal_cliques(const WeightedGraph &g);

/// k-core index of every node (Batagelj-Zaversnik).
std::vector<std::size_t> core_decomposition(const WeightedGraph &g);

/// Component id per node, numbered in order of lowest member index.
std::vector<std::size_t> component_labels(const WeightedGraph &g);

ComponentSummary graph_components(const WeightedGraph &g);

} // namespace conflictnet
