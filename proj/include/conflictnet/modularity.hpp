#pragma once

#include "conflictnet/graph.hpp"
#include "conflictnet/partition.hpp"

#include <cstddef>
#include <vector>

namespace conflictnet {

/// Newman modularity with weighted strengths. Throws std::invalid_argument
/// when the partition does not cover the graph or the graph has no weight.
double modularity(const WeightedGraph &g, const Partition &p);

struct Merge {
    /// Surviving community (the smaller id) and the one absorbed into it.
    std::size_t kept;
    std::size_t absorbed;
    double gain;
    double modularity_after;
};

struct FastGreedyResult {
    Partition partition;
    /// Every merge performed until no connected pair of communities remained.
    std::vector<Merge> dendrogram;
    /// Number of leading merges applied to obtain `partition`.
    std::size_t cut = 0;
    double modularity = 0.0;
};

/// Clauset-Newman-Moore agglomeration from singletons. Ties on the gain go
/// to the lexicographically smallest pair of community ids; the returned cut
/// is the earliest one reaching the maximum modularity.
FastGreedyResult fast_greedy(const WeightedGraph &g);

} // namespace conflictnet
