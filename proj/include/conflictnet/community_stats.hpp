#pragma once

#include "conflictnet/graph.hpp"
#include "conflictnet/partition.hpp"

#include <cstddef>
#include <vector>

namespace conflictnet {

/// Vertex characteristics of one community. Coefficients of variation are
/// percentages of the population standard deviation over the mean (0 when
/// the mean is 0).
struct CommunityProfile {
    std::size_t count = 0;
    double mean_intra_degree = 0.0;
    double intra_degree_cv = 0.0;
    double mean_degree = 0.0;
    double degree_cv = 0.0;
    /// Mean local clustering of members inside the community's induced subgraph.
    double clustering = 0.0;
    /// Mean local clustering of members computed on the whole graph.
    double graph_clustering = 0.0;
};

struct CommunityStats {
    /// Indexed by the partition's 0-based community label.
    std::vector<CommunityProfile> communities;
};

/// Degrees and clustering on the binarized graph.
CommunityStats community_vertex_stats(const WeightedGraph &g, const Partition &p);

} // namespace conflictnet
