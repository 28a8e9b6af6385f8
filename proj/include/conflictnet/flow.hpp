#pragma once

#include "conflictnet/partition.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace conflictnet {

/// A partition together with the ids of the nodes it labels.
struct LabeledPartition {
    Partition partition;
    std::vector<std::string> node_ids;
};

/// Node movements between the communities of consecutive periods.
///
/// Sources are the earlier communities followed by "new"; targets are the
/// later communities followed by "inactive". Communities are named Q1, Q2, ...
struct FlowMatrix {
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    /// sources.size() x targets.size(), row-major.
    std::vector<std::int64_t> counts;

    std::int64_t at(std::size_t source, std::size_t target) const {
        return counts[source * targets.size() + target];
    }
    std::vector<std::int64_t> row_sums() const;
    std::vector<std::int64_t> column_sums() const;
};

/// Throws std::invalid_argument if a partition and its id list disagree in
/// size or an id repeats.
FlowMatrix community_flow(const LabeledPartition &previous, const LabeledPartition &next);

} // namespace conflictnet
